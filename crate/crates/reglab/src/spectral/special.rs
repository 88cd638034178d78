//! Semicircle Stieltjes transform and the standard normal CDF.

use num_complex::Complex64;

use super::{ComplexEnergy, SpectralError};

/// m_sc(z) = (-z + sqrt(z^2 - 4)) / 2, branch with Im m > 0 for eta > 0
/// and m -> 0 at infinity. The two roots of m^2 + z m + 1 = 0 multiply to
/// one, so the decaying branch is the root with |m| < 1.
pub fn m_sc(z: ComplexEnergy) -> Result<Complex64, SpectralError> {
    if z.eta == 0.0 && z.e.abs() <= 2.0 {
        return Err(SpectralError::BranchUndefined(z.e));
    }
    let zc = z.z();
    let w = (zc * zc - 4.0).sqrt();
    let m1 = (-zc + w) / 2.0;
    let m2 = (-zc - w) / 2.0;
    let m = if m1.norm() <= m2.norm() { m1 } else { m2 };
    if z.eta > 0.0 && m.im <= 0.0 {
        // should be unreachable; the |m|<1 root has positive imaginary part
        return Err(SpectralError::BranchUndefined(z.e));
    }
    Ok(m)
}

/// Complementary error function, Cody's rational Chebyshev approximation
/// (relative error ~1e-16 across the range).
pub fn erfc(x: f64) -> f64 {
    const A: [f64; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [f64; 4] = [
        2.36012909523441209e1,
        2.44024637934444173e2,
        1.28261652607737228e3,
        2.84423683343917062e3,
    ];
    const C: [f64; 9] = [
        5.64188496988670089e-1,
        8.88314979438837594e0,
        6.61191906371416295e1,
        2.98635138197400131e2,
        8.81952221241769090e2,
        1.71204761263407058e3,
        2.05107837782607147e3,
        1.23033935479799725e3,
        2.15311535474403846e-8,
    ];
    const D: [f64; 8] = [
        1.57449261107098347e1,
        1.17693950891312499e2,
        5.37181101862009858e2,
        1.62138957456669019e3,
        3.29079923573345963e3,
        4.36261909014324716e3,
        3.43936767414372164e3,
        1.23033935480374942e3,
    ];
    const P: [f64; 6] = [
        3.05326634961232344e-1,
        3.60344899949804439e-1,
        1.25781726111229246e-1,
        1.60837851487422766e-2,
        6.58749161529837803e-4,
        1.63153871373020978e-2,
    ];
    const Q: [f64; 5] = [
        2.56852019228982242e0,
        1.87295284992346047e0,
        5.27905102951428412e-1,
        6.05183413124413191e-2,
        2.33520497626869185e-3,
    ];
    const SQRPI: f64 = 5.6418958354775628695e-1;

    let y = x.abs();
    let result = if y <= 0.46875 {
        let z = if y > 1e-300 { y * y } else { 0.0 };
        let mut xnum = A[4] * z;
        let mut xden = z;
        for i in 0..3 {
            xnum = (xnum + A[i]) * z;
            xden = (xden + B[i]) * z;
        }
        return 1.0 - x * (xnum + A[3]) / (xden + B[3]);
    } else if y <= 4.0 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        let r = (xnum + C[7]) / (xden + D[7]);
        let ysq = (y * 16.0).floor() / 16.0;
        let del = (y - ysq) * (y + ysq);
        (-ysq * ysq).exp() * (-del).exp() * r
    } else if y < 26.5 {
        let z = 1.0 / (y * y);
        let mut xnum = P[5] * z;
        let mut xden = z;
        for i in 0..4 {
            xnum = (xnum + P[i]) * z;
            xden = (xden + Q[i]) * z;
        }
        let mut r = z * (xnum + P[4]) / (xden + Q[4]);
        r = (SQRPI - r) / y;
        let ysq = (y * 16.0).floor() / 16.0;
        let del = (y - ysq) * (y + ysq);
        (-ysq * ysq).exp() * (-del).exp() * r
    } else {
        0.0
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

/// Standard normal CDF; absolute error below 1e-12 on |x| <= 8, clamped
/// to {0, 1} beyond.
pub fn normal_cdf(x: f64) -> f64 {
    if x > 8.0 {
        return 1.0;
    }
    if x < -8.0 {
        return 0.0;
    }
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse standard normal CDF (used to inject exact quantile streams in
/// tests and control experiments). Acklam's rational approximation
/// polished by one Halley step of Newton's method; |error| < 1e-13.
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1)");
    // Acklam coefficients
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let plow = 0.02425;
    let x = if p < plow {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - plow {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    // Halley refinement against the high-accuracy CDF
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_axis_limit_at_2p5() {
        let m = m_sc(ComplexEnergy::new(2.5, 0.0)).unwrap();
        assert!((m.re + 0.5).abs() < 1e-14);
        assert!(m.im.abs() < 1e-14);
    }

    #[test]
    fn at_z_eq_i() {
        let m = m_sc(ComplexEnergy::new(0.0, 1.0)).unwrap();
        let want = (5f64.sqrt() - 1.0) / 2.0;
        assert!(m.re.abs() < 1e-14);
        assert!((m.im - want).abs() < 1e-12);
    }

    #[test]
    fn at_z_eq_10() {
        // extended-precision value of (-10 + sqrt(96)) / 2
        let m = m_sc(ComplexEnergy::new(10.0, 0.0)).unwrap();
        assert!((m.re - (-0.10102051443364424)).abs() < 1e-14);
    }

    #[test]
    fn branch_undefined_inside_bulk_on_real_axis() {
        assert!(m_sc(ComplexEnergy::new(0.5, 0.0)).is_err());
        assert!(m_sc(ComplexEnergy::new(-2.0, 0.0)).is_err());
    }

    #[test]
    fn self_consistency_on_grid() {
        for i in 0..100 {
            let e = -3.0 + 6.0 * (i as f64) / 99.0;
            let eta = 0.05 + (i as f64) * 0.01;
            let z = ComplexEnergy::new(e, eta);
            let m = m_sc(z).unwrap();
            let resid = m * m + z.z() * m + 1.0;
            assert!(resid.norm() < 1e-12, "resid {} at {:?}", resid.norm(), z);
            assert!(m.im > 0.0);
        }
    }

    #[test]
    fn negative_real_axis_branch_decays() {
        let m = m_sc(ComplexEnergy::new(-10.0, 0.0)).unwrap();
        assert!(m.re > 0.0 && m.re < 0.2);
    }

    #[test]
    fn cdf_matches_extended_precision_oracle() {
        // values frozen from a 25-digit computation
        let table = [
            (0.25, 0.5987063256829237),
            (2.5, 0.9937903346742239),
            (-1.5, 0.06680720126885807),
            (5.0, 0.9999997133484281),
            (8.0, 0.9999999999999994),
            (-8.0, 6.220960574271784e-16),
        ];
        for (x, want) in table {
            assert!((normal_cdf(x) - want).abs() < 1e-13, "x={x}");
        }
    }

    #[test]
    fn cdf_basics() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-13);
        for &x in &[0.3, 1.7, 4.2, 7.9] {
            assert!((normal_cdf(x) + normal_cdf(-x) - 1.0).abs() < 1e-14);
        }
        assert_eq!(normal_cdf(9.0), 1.0);
        assert_eq!(normal_cdf(-9.0), 0.0);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..200 {
            let p = i as f64 / 200.0;
            let x = normal_quantile(p);
            assert!((normal_cdf(x) - p).abs() < 1e-12, "p={p}");
        }
    }
}
