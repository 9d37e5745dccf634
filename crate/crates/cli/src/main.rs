use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use knotasym::asymptotics::fit_growth_window;
use knotasym::jones::{fig8_prec, jones_at, stevedore_prec, KnotId, XiParams};
use knotasym::numerics::{kappa, pi, to_f64s};
use knotasym::slrep::{cs_st, riley_branches_st};
use knotasym::{Complex, Error, Float};

mod verify;

#[derive(Parser, Debug)]
#[command(name = "knotasym", version, about = "Colored Jones asymptotics of the figure-eight and stevedore knots")]
struct Cli {
    /// Working precision in bits; commands raise it where a schedule demands more.
    #[arg(long, global = true, env = "KNOTASYM_PREC", default_value_t = 128, value_parser = clap::value_parser!(u32).range(64..))]
    prec: u32,
    /// Worker threads (0: one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Write records here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Significant digits in emitted numbers.
    #[arg(long, global = true, default_value_t = 15, value_parser = clap::value_parser!(u32).range(1..=17))]
    digits: u32,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum Knot {
    Fig8,
    St,
}

impl From<Knot> for KnotId {
    fn from(k: Knot) -> Self {
        match k {
            Knot::Fig8 => KnotId::FigureEight,
            Knot::St => KnotId::Stevedore,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Suite {
    Tn,
    Poisson,
    Saddle,
    Main,
    Gvc,
    Assembly,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// J_N(K; e^{(u + 2 p pi i)/N}) for a range of N.
    Jones {
        #[arg(long, value_enum)]
        knot: Knot,
        /// `kappa`, `log2`, either with a leading `-`, or a number.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value_t = 1)]
        p: u32,
        /// Inclusive range `a..b`, or a single N.
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u32>,
    },
    /// Run a numerical check suite and print a JSON report.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Fit xi log(J_{N+1}/J_N) to S + c1/N + c2/N^2.
    Fit {
        #[arg(long, value_enum)]
        knot: Knot,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(30..))]
        n_max: u32,
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        /// `re,im`: pick the lattice representative of S nearest to this.
        #[arg(long, allow_hyphen_values = true)]
        reference: Option<String>,
    },
    /// v, CS and S along u in [0, log 2], and the four Riley roots on m in [1, 2].
    StevedoreScan {
        #[arg(long, value_parser = clap::value_parser!(u32).range(10..))]
        m_steps: u32,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (a, b.trim_start_matches('=')),
        None => (s, s),
    };
    let a: u32 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if a < 1 || b < a {
        return Err(format!("need 1 <= a <= b, got {a}..{b}"));
    }
    Ok(a..=b)
}

fn parse_u(s: &str, prec: u32) -> anyhow::Result<Float> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let v = match body {
        "kappa" => kappa(prec),
        "log2" => Float::with_val(prec, 2).ln(),
        _ => {
            let x: f64 = s.parse().with_context(|| format!("bad u: {s}"))?;
            return Ok(Float::with_val(prec, x));
        }
    };
    Ok(if neg { -v } else { v })
}

/// Rounds to `digits` significant figures; refuses NaN and infinities.
struct Fmt(u32);

impl Fmt {
    fn num(&self, x: f64, what: &str) -> anyhow::Result<f64> {
        if !x.is_finite() {
            bail!("{what} is not finite");
        }
        let s = format!("{:.*e}", self.0 as usize - 1, x);
        // adding zero turns -0 into 0
        Ok(s.parse::<f64>()? + 0.0)
    }

    fn float(&self, x: &Float, what: &str) -> anyhow::Result<f64> {
        self.num(x.to_f64(), what)
    }
}

struct Sink {
    out: Box<dyn Write>,
    format: Format,
    csv: Option<csv::Writer<Box<dyn Write>>>,
}

impl Sink {
    fn new(path: Option<&PathBuf>, format: Format) -> anyhow::Result<Self> {
        let open = || -> anyhow::Result<Box<dyn Write>> {
            Ok(match path {
                Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("{}", p.display()))?)),
                None => Box::new(BufWriter::new(io::stdout())),
            })
        };
        Ok(match format {
            Format::Json => Sink { out: open()?, format, csv: None },
            Format::Csv => Sink {
                out: Box::new(io::sink()),
                format,
                csv: Some(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(open()?)),
            },
        })
    }

    fn emit<T: Serialize>(&mut self, rec: &T) -> anyhow::Result<()> {
        match (self.format, self.csv.as_mut()) {
            (Format::Csv, Some(w)) => w.serialize(rec)?,
            _ => {
                serde_json::to_writer(&mut self.out, rec)?;
                self.out.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    fn finish(mut self) -> anyhow::Result<()> {
        if let Some(w) = self.csv.as_mut() {
            w.flush()?;
        }
        self.out.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct JonesRec {
    #[serde(rename = "N")]
    n: u32,
    re: f64,
    im: f64,
    log_abs: f64,
    arg: f64,
}

#[derive(Serialize)]
struct FitRec {
    #[serde(rename = "S_re")]
    s_re: f64,
    #[serde(rename = "S_im")]
    s_im: f64,
    c1_re: f64,
    c1_im: f64,
    c2_re: f64,
    c2_im: f64,
    residual_rms: f64,
    canonical_re: f64,
    canonical_im: f64,
    n_min: u32,
    n_max: u32,
}

#[derive(Serialize, Default)]
struct ScanRec {
    kind: &'static str,
    u: Option<f64>,
    v_re: Option<f64>,
    v_im: Option<f64>,
    #[serde(rename = "CS_re")]
    cs_re: Option<f64>,
    #[serde(rename = "CS_im")]
    cs_im: Option<f64>,
    #[serde(rename = "S_re")]
    s_re: Option<f64>,
    #[serde(rename = "S_im")]
    s_im: Option<f64>,
    m: Option<f64>,
    d1_re: Option<f64>,
    d1_im: Option<f64>,
    d2_re: Option<f64>,
    d2_im: Option<f64>,
    d3_re: Option<f64>,
    d3_im: Option<f64>,
    d4_re: Option<f64>,
    d4_im: Option<f64>,
    collision: bool,
}

fn knot_prec(knot: KnotId, n: u32, base: u32) -> u32 {
    let sched = match knot {
        KnotId::FigureEight => fig8_prec(n),
        KnotId::Stevedore => stevedore_prec(n),
    };
    sched.max(base)
}

/// `J_N` at each N, computed in parallel and returned in N order.
fn jones_values(knot: KnotId, u: &str, p: u32, ns: RangeInclusive<u32>, base: u32) -> anyhow::Result<Vec<(u32, Complex)>> {
    ns.collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let prec = knot_prec(knot, n, base);
            let xi = XiParams::new(parse_u(u, prec)?, p, n, prec);
            Ok((n, jones_at(knot, &xi)?))
        })
        .collect()
}

fn cmd_jones(cli: &Cli, knot: KnotId, u: &str, p: u32, ns: RangeInclusive<u32>) -> anyhow::Result<()> {
    parse_u(u, 64)?;
    let vals = jones_values(knot, u, p, ns, cli.prec)?;
    let f = Fmt(cli.digits);
    let mut sink = Sink::new(cli.output.as_ref(), cli.format)?;
    for (n, j) in &vals {
        let prec = j.prec().0;
        let (re, im) = to_f64s(j);
        let la = Float::with_val(prec, j.abs_ref()).ln();
        let arg = Float::with_val(prec, j.arg_ref());
        sink.emit(&JonesRec {
            n: *n,
            re: f.num(re, "re J")?,
            im: f.num(im, "im J")?,
            log_abs: f.float(&la, "log|J|")?,
            arg: f.float(&arg, "arg J")?,
        })?;
    }
    sink.finish()
}

fn parse_pair(s: &str, prec: u32) -> anyhow::Result<Complex> {
    let (a, b) = s.split_once(',').context("reference must be re,im")?;
    Ok(Complex::with_val(prec, (a.trim().parse::<f64>()?, b.trim().parse::<f64>()?)))
}

fn cmd_fit(cli: &Cli, knot: KnotId, u: &str, p: u32, n_min: u32, n_max: u32, reference: Option<&str>) -> anyhow::Result<()> {
    if n_min < 1 || n_min + 10 > n_max {
        bail!("need 1 <= n-min and at least ten values up to n-max");
    }
    let prec = cli.prec;
    let uf = parse_u(u, prec)?;
    let xi = XiParams::new(uf.clone(), p, 1, prec).xi();
    // values run one past n_max so that y_{n_max} exists
    let vals = jones_values(knot, u, p, n_min..=n_max + 1, prec)?;
    let fit = fit_growth_window(&vals, &xi, n_min, n_max)?;
    let reference = match (reference, knot) {
        (Some(r), _) => parse_pair(r, prec)?,
        (None, KnotId::FigureEight) => {
            // 2 u pi i
            Complex::with_val(prec, (0, Float::with_val(prec, pi(prec) * &uf) * 2u32))
        }
        (None, KnotId::Stevedore) if uf > 0 && uf <= Float::with_val(prec, 2).ln() => cs_st(&uf)?.s,
        (None, KnotId::Stevedore) => fit.s.clone(),
    };
    let canon = fit.canonical(&xi, &reference);
    let f = Fmt(cli.digits);
    let (s, c1, c2, cn) = (to_f64s(&fit.s), to_f64s(&fit.c1), to_f64s(&fit.c2), to_f64s(&canon));
    let mut sink = Sink::new(cli.output.as_ref(), cli.format)?;
    sink.emit(&FitRec {
        s_re: f.num(s.0, "S")?,
        s_im: f.num(s.1, "S")?,
        c1_re: f.num(c1.0, "c1")?,
        c1_im: f.num(c1.1, "c1")?,
        c2_re: f.num(c2.0, "c2")?,
        c2_im: f.num(c2.1, "c2")?,
        residual_rms: f.num(fit.residual_rms, "rms")?,
        canonical_re: f.num(cn.0, "canonical S")?,
        canonical_im: f.num(cn.1, "canonical S")?,
        n_min: fit.n_range.0,
        n_max: fit.n_range.1,
    })?;
    sink.finish()
}

fn scan_u(u: &Float, f: &Fmt) -> anyhow::Result<ScanRec> {
    let mut rec = ScanRec { kind: "u", u: Some(f.float(u, "u")?), ..Default::default() };
    match cs_st(u) {
        Ok(pt) => {
            let (v, cs, s) = (to_f64s(&pt.v), to_f64s(&pt.cs), to_f64s(&pt.s));
            rec.v_re = Some(f.num(v.0, "v")?);
            rec.v_im = Some(f.num(v.1, "v")?);
            rec.cs_re = Some(f.num(cs.0, "CS")?);
            rec.cs_im = Some(f.num(cs.1, "CS")?);
            rec.s_re = Some(f.num(s.0, "S")?);
            rec.s_im = Some(f.num(s.1, "S")?);
        }
        Err(Error::BranchCollision) => rec.collision = true,
        Err(e) => return Err(e.into()),
    }
    Ok(rec)
}

fn scan_m(m: &Float, f: &Fmt) -> anyhow::Result<ScanRec> {
    let mut rec = ScanRec { kind: "m", m: Some(f.float(m, "m")?), ..Default::default() };
    match riley_branches_st(m) {
        Ok(br) => {
            let r: Vec<(f64, f64)> = br.roots.iter().map(to_f64s).collect();
            let slots = [
                (&mut rec.d1_re, &mut rec.d1_im),
                (&mut rec.d2_re, &mut rec.d2_im),
                (&mut rec.d3_re, &mut rec.d3_im),
                (&mut rec.d4_re, &mut rec.d4_im),
            ];
            for ((re, im), (a, b)) in slots.into_iter().zip(r) {
                *re = Some(f.num(a, "root")?);
                *im = Some(f.num(b, "root")?);
            }
        }
        Err(Error::BranchCollision) => rec.collision = true,
        Err(e) => return Err(e.into()),
    }
    Ok(rec)
}

fn cmd_scan(cli: &Cli, steps: u32) -> anyhow::Result<()> {
    let prec = cli.prec;
    let f = Fmt(cli.digits);
    let top = Float::with_val(prec, 2).ln();
    let us: Vec<Float> = (0..=steps).map(|k| Float::with_val(prec, &top * k) / steps).collect();
    let ms: Vec<Float> = (0..=steps).map(|k| Float::with_val(prec, k) / steps + 1u32).collect();
    let mut recs: Vec<ScanRec> = us.par_iter().map(|u| scan_u(u, &f)).collect::<anyhow::Result<_>>()?;
    recs.extend(ms.par_iter().map(|m| scan_m(m, &f)).collect::<anyhow::Result<Vec<_>>>()?);
    let mut sink = Sink::new(cli.output.as_ref(), cli.format)?;
    for r in &recs {
        sink.emit(r)?;
    }
    sink.finish()
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global()?;
    }
    match &cli.cmd {
        Cmd::Jones { knot, u, p, n } => cmd_jones(cli, (*knot).into(), u, *p, n.clone())?,
        Cmd::Fit { knot, u, p, n_max, n_min, reference } => {
            cmd_fit(cli, (*knot).into(), u, *p, *n_min, *n_max, reference.as_deref())?
        }
        Cmd::StevedoreScan { m_steps } => cmd_scan(cli, *m_steps)?,
        Cmd::Verify { suite } => {
            let checks = verify::run(*suite, cli.prec);
            let mut sink = Sink::new(cli.output.as_ref(), Format::Json)?;
            let mut ok = true;
            for c in &checks {
                ok &= c.pass;
                sink.emit(c)?;
            }
            sink.finish()?;
            return Ok(ok);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
