use knotasym::jones::XiParams;
use knotasym::numerics::{abs_f64, cplx, kappa, pow2_neg, two_pi_i};
use knotasym::qdilog::*;
use knotasym::special::{l012, Level};
use knotasym::Complex;

const P: u32 = 192;

fn params(p: u32, n: u32) -> QDParams {
    QDParams::new(XiParams::new(kappa(P), p, 1, P).gamma(), n, P).unwrap()
}

fn lattice(xs: &[f64], ys: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect()
}

fn check_all<F>(pts: &[(f64, f64)], what: &str, q: &QDParams, f: F)
where
    F: Fn(&Complex, &QDParams) -> knotasym::Result<Complex>,
{
    assert_eq!(pts.len(), 20, "{what}: grid size");
    let tol = pow2_neg(P, (P - 20) as i32).to_f64();
    for &(x, y) in pts {
        let r = f(&cplx(P, x, y), q).unwrap_or_else(|e| panic!("{what} at {x}+{y}i: {e}"));
        let a = abs_f64(&r);
        assert!(a < tol, "{what} (p={}, N={}) at {x}{y:+}i: {a:e}", q.gamma.real().to_f64().round(), q.n);
    }
}

#[test]
fn identity_suite() {
    for (p, n) in [(1u32, 50u32), (1, 100), (2, 60)] {
        let q = params(p, n);
        let e = q.edge().to_f64();
        let ys = [-0.4, -0.1, 0.15, 0.45];

        // both z and z+1 inside the base strip
        let tight = lattice(&[-0.8 * e, -0.4 * e, 0.0, 0.4 * e, 0.8 * e], &ys);
        check_all(&tight, "unit shift, base strip", &q, residual_unit_shift);

        let wide = lattice(&[-0.7, -0.35, 0.2, 0.55, 0.85], &ys);
        check_all(&wide, "unit shift, extended", &q, residual_unit_shift);

        let strip = lattice(&[0.1, 0.3, 0.5, 0.7, 0.9], &ys);
        check_all(&strip, "gamma shift, strip", &q, residual_gamma_shift);

        let omega: Vec<_> = lattice(&[-0.75, -0.45, -0.15, 1.15, 1.45, 1.75], &[-0.35, 0.05, 0.3, 0.6])
            .into_iter()
            .filter(|&(x, y)| in_omega(&cplx(P, x, y), &q))
            .take(20)
            .collect();
        check_all(&omega, "gamma shift, Omega", &q, residual_gamma_shift);

        let s = p as f64 / n as f64;
        let mut tricky: Vec<_> = [0.0, 0.01, -0.02, 0.05, -0.1, 0.2].iter().map(|&y| (0.0, y)).collect();
        tricky.push((0.0, 0.3));
        tricky.extend(lattice(&[0.2 * s, 0.6 * s], &[-0.05, 0.0, 0.05, 0.2]).into_iter().filter(|p| p.1 != 0.0));
        tricky.extend(lattice(&[-0.2 * s, -0.6 * s], &[-0.05, 0.0, 0.05, 0.2]).into_iter().filter(|p| p.1 != 0.0));
        tricky.push((0.9 * s, 0.1));
        check_all(&tricky, "three-case identity", &q, residual_tricky);
    }
}

#[test]
fn off_region_correction_is_two_pi_i() {
    let q = params(1, 50);
    let z = cplx(P, -0.5, 0.03);
    assert!(in_delta0_plus(&z, &q));
    let h = q.half_step();
    let lhs = tn(&Complex::with_val(P, &z - &h), &q).unwrap() - tn(&Complex::with_val(P, &z + &h), &q).unwrap();
    let rhs = l012(Level::L1, &z).unwrap() - two_pi_i(P);
    assert!(abs_f64(&(lhs - rhs)) < 1e-50);
}

#[test]
fn gap_to_l2_is_order_one_over_n() {
    let region = OmegaStar::default();
    let half = cplx(P, 0.5, 0.0);
    let gaps: Vec<f64> = [50u32, 100, 200]
        .iter()
        .map(|&n| abs_f64(&tn_l2_gap(&half, &params(1, n), &region).unwrap()))
        .collect();
    assert!(gaps[1] < gaps[0]);
    let scaled: Vec<f64> = gaps.iter().zip([50.0, 100.0, 200.0]).map(|(g, n)| g * n).collect();
    let (lo, hi) = scaled.iter().fold((f64::MAX, 0f64), |(a, b), &s| (a.min(s), b.max(s)));
    assert!(hi / lo < 3.0, "{scaled:?}");

    let left = cplx(P, -0.5, 0.3);
    let g1 = abs_f64(&tn_l2_gap(&left, &params(1, 50), &region).unwrap());
    let g2 = abs_f64(&tn_l2_gap(&left, &params(1, 100), &region).unwrap());
    assert!(g2 < g1, "{g1} {g2}");
    assert!(tn_l2_gap(&cplx(P, 0.5, 3.5), &params(1, 50), &region).is_err());
}

#[test]
fn l2_model_decays_off_the_bowtie() {
    for (x, y) in [(0.3, 0.4), (0.6, -0.5), (-0.4, 0.8)] {
        let z = cplx(P, x, y);
        let gamma = params(1, 5).gamma;
        assert!(!in_bowtie(&z, 0.05, &gamma));
        let r: Vec<f64> = [5u32, 10, 20]
            .iter()
            .map(|&n| abs_f64(&l2_l1_model_residual(&z, &params(1, n)).unwrap()))
            .collect();
        assert!(r[1] < r[0] && r[2] < r[1], "{r:?}");
        // exponential: the ratio itself shrinks
        assert!(r[2] / r[1] < 1.5 * r[1] / r[0], "{r:?}");
    }
}
