use knotasym::numerics::{abs_f64, cplx, log, pi, pow2_neg, two_pi_i};
use knotasym::special::*;
use knotasym::rug::{Integer, Rational};
use knotasym::{Complex, Float};
use proptest::prelude::*;

const P: u32 = 128;

fn zeta2(prec: u32) -> Float {
    Float::with_val(prec, pi(prec).square_ref()) / 6u32
}

fn off_axis() -> impl Strategy<Value = (f64, f64)> {
    (-4.0f64..4.0, prop_oneof![-3.0f64..-0.05, 0.05f64..3.0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn li2_reflection((x, y) in off_axis()) {
        let z = cplx(P, x, y);
        let w = Complex::with_val(P, 1 - &z);
        let r = li2(&z).unwrap() + li2(&w).unwrap() - zeta2(P) + Complex::with_val(P, log(&z) * log(&w));
        prop_assert!(abs_f64(&r) < 1e-33, "{}", abs_f64(&r));
    }

    #[test]
    fn li2_inversion((x, y) in off_axis()) {
        let z = cplx(P, x, y);
        let l = log(&Complex::with_val(P, -&z));
        let zi = Complex::with_val(P, z.recip_ref());
        let r = li2(&z).unwrap() + li2(&zi).unwrap() + zeta2(P) + Complex::with_val(P, l.square_ref()) / 2u32;
        prop_assert!(abs_f64(&r) < 1e-33);
    }

    #[test]
    fn li2_has_no_jump_on_the_negative_axis(x in -6.0f64..-0.01) {
        let eps = 1e-30;
        let a = li2(&cplx(P, x, eps)).unwrap();
        let b = li2(&cplx(P, x, -eps)).unwrap();
        prop_assert!(abs_f64(&(a - b)) < 1e-25);
    }

    #[test]
    fn l_shift_identities(x in -1.5f64..1.5, y in -2.0f64..-0.01) {
        let (a, b) = l012_shift_residual(&cplx(P, x, y)).unwrap();
        let tol = pow2_neg(P, (P - 12) as i32).to_f64();
        prop_assert!(abs_f64(&a) < tol && abs_f64(&b) < tol);
    }

    #[test]
    fn l_derivatives((x, y) in (-1.5f64..1.5, prop_oneof![-1.0f64..-0.05, 0.05f64..1.0])) {
        let wp = 3 * P;
        let z = cplx(wp, x, y);
        let h = pow2_neg(wp, (wp / 3) as i32);
        let tpi = two_pi_i(wp);
        let zp = Complex::with_val(wp, &z + &h);
        let zm = Complex::with_val(wp, &z - &h);
        let two_h = Float::with_val(wp, &h * 2u32);
        let d2 = (l012(Level::L2, &zp).unwrap() - l012(Level::L2, &zm).unwrap()) / &two_h;
        let d1 = (l012(Level::L1, &zp).unwrap() - l012(Level::L1, &zm).unwrap()) / &two_h;
        let r2 = d2 + Complex::with_val(wp, &tpi * l012(Level::L1, &z).unwrap());
        let e = Complex::with_val(wp, Complex::with_val(wp, &tpi * &z) * -1i32).exp();
        let r1 = d1 - Complex::with_val(wp, &tpi / Complex::with_val(wp, 1 - e));
        prop_assert!(abs_f64(&r2) < 1e-70 && abs_f64(&r1) < 1e-70, "{} {}", abs_f64(&r2), abs_f64(&r1));
    }

    #[test]
    fn csc_table_exact(m in 1u32..=16) {
        let t = csc_coeffs(m);
        let mut fact = Integer::from(1);
        for k in 2..=m + 1 {
            fact *= k;
        }
        prop_assert!(t.coeffs.values().all(|a| *a > 0));
        prop_assert_eq!(t.sum(), Rational::from((fact, 2)));
        prop_assert_eq!(t.coeffs.get(&m), Some(&Rational::from(1)));
        // only indices of the parity of m occur
        prop_assert!(t.coeffs.keys().all(|j| j % 2 == m % 2 && *j <= m));
    }
}

#[test]
fn l_level_spot_values() {
    let half = cplx(P, 0.5, 0.0);
    let l0 = l012(Level::L0, &half).unwrap();
    assert!(abs_f64(&(l0 + Complex::with_val(P, (0, pi(P))))) < 1e-35);
    let l1 = l012(Level::L1, &half).unwrap();
    assert!(abs_f64(&(l1 - Float::with_val(P, 2).ln())) < 1e-35);
    let l2 = l012(Level::L2, &half).unwrap();
    assert!(abs_f64(&(l2 + Float::with_val(P, pi(P).square_ref()) / 12u32)) < 1e-35);
    assert!(l012(Level::L1, &cplx(P, 1.5, 0.0)).is_err());
    assert!(l012(Level::L0, &cplx(P, 2.0, 0.0)).is_err());
}

#[test]
fn gamma_third_precision_monotone() {
    let lo = gamma_third(64);
    let hi = gamma_third(256);
    assert!((Float::with_val(256, &hi - &lo).abs() / &hi).to_f64() < 2f64.powi(-62));
    assert!((lo.to_f64() - 2.678938534707747).abs() < 1e-14);
}
