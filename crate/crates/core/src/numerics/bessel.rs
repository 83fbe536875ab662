//! Modified Bessel function of the second kind K_ν(x) for real order.
//!
//! Two regimes, both producing the pair (K_μ, K_{μ+1}) with |μ| ≤ 1/2:
//! Temme's series for x ≤ 2 and Steed's continued fraction (CF2) for
//! x > 2, followed by the stable upward recurrence
//! K_{μ+j+1} = K_{μ+j−1} + (2(μ+j)/x) K_{μ+j} to reach ν = μ + n.
//! The CF2 branch works throughout in e^x-scaled space, so the only
//! overflow/underflow is the final rescale: values below the smallest
//! representable magnitude flush to zero, and values too large for f64
//! (enormous order at small argument) saturate to +∞.

use crate::error::{Error, Result};
use crate::numerics::special::EULER_GAMMA;

const MAX_ITER: usize = 20_000;

/// Modified Bessel function of the second kind K_ν(x) for real order
/// `nu` (either sign; K_{−ν} = K_ν) and argument `x > 0`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !nu.is_finite() {
        return Err(Error::domain("bessel_k", "order must be finite"));
    }
    if !x.is_finite() || !(x > 0.0) {
        return Err(Error::domain("bessel_k", "argument must be positive and finite"));
    }
    let nu = nu.abs();
    // Reduce to K_μ with |μ| ≤ 1/2 plus n upward recurrences.
    let n = (nu + 0.5).floor();
    let mu = nu - n;
    let (mut kmu, mut k1, scaled) = if x <= 2.0 {
        let (a, b) = k_temme_series(mu, x)?;
        (a, b, false)
    } else {
        let (a, b) = k_cf2(mu, x)?;
        (a, b, true)
    };
    // All terms are positive, so the dominant-solution recurrence is stable.
    let mut j = 1.0;
    while j <= n {
        let next = kmu + (2.0 * (mu + j) / x) * k1;
        kmu = k1;
        k1 = next;
        j += 1.0;
    }
    if scaled {
        if kmu.is_infinite() {
            return Ok(f64::INFINITY);
        }
        // e^{−x} is evaluated directly so underflow flushes the result to 0.
        Ok(kmu * (-x).exp())
    } else {
        Ok(kmu)
    }
}

/// Temme's series for (K_μ(x), K_{μ+1}(x)), 0 < x ≤ 2, |μ| ≤ 1/2, unscaled.
fn k_temme_series(mu: f64, x: f64) -> Result<(f64, f64)> {
    let x2 = 0.5 * x;
    let mu2 = mu * mu;
    let dl = -x2.ln();
    let e = mu * dl;
    let fact = inv_sinc(std::f64::consts::PI * mu);
    let fact2 = sinhc(e);
    let (gam1, gam2, eps_hat, w_hat) = gam_pair(mu);
    // f₀ = (πμ/sin πμ) [Γ₁(μ) cosh(μ ln(2/x)) + Γ₂(μ) sinhc(μ ln(2/x)) ln(2/x)]
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * dl);
    // p₀ = ½ (x/2)^{−μ} Γ(1+μ), q₀ = ½ (x/2)^{μ} Γ(1−μ), via lnΓ(1±μ) = ε̂ ± ŵ.
    let mut p = 0.5 * (e + eps_hat + w_hat).exp();
    let mut q = 0.5 * (-e + eps_hat - w_hat).exp();
    let mut sum = ff;
    let mut sum1 = p;
    let mut c = 1.0;
    let x2sq = x2 * x2;
    for i in 1..=MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= x2sq / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * f64::EPSILON {
            return Ok((sum, sum1 * 2.0 / x));
        }
    }
    Err(Error::NonConvergence {
        value: sum,
        error: (c * ff).abs(),
        subdivisions: MAX_ITER,
    })
}

/// Steed's CF2 for the e^x-scaled pair (K_μ(x), K_{μ+1}(x)), x > 2, |μ| ≤ 1/2.
fn k_cf2(mu: f64, x: f64) -> Result<(f64, f64)> {
    let mu2 = mu * mu;
    let a1 = 0.25 - mu2;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0_f64;
    let mut q2 = 1.0_f64;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..=MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            value: s,
            error: (q * delh / s).abs(),
            subdivisions: MAX_ITER,
        });
    }
    let h = a1 * h;
    let kmu = (std::f64::consts::PI / (2.0 * x)).sqrt() / s;
    let k1 = kmu * (mu + x + 0.5 - h) / x;
    Ok((kmu, k1))
}

/// Temme's gamma pair for |μ| ≤ 1/2:
/// Γ₁ = [1/Γ(1−μ) − 1/Γ(1+μ)]/(2μ) (→ −γ as μ → 0) and
/// Γ₂ = [1/Γ(1−μ) + 1/Γ(1+μ)]/2, plus (ε̂, ŵ) with lnΓ(1±μ) = ε̂ ± ŵ.
fn gam_pair(mu: f64) -> (f64, f64, f64, f64) {
    debug_assert!(mu.abs() <= 0.5 + 1e-12);
    let a = statrs::function::gamma::ln_gamma(1.0 + mu);
    let b = statrs::function::gamma::ln_gamma(1.0 - mu);
    // ε̂ is O(μ²); the cancellation in a + b is harmless because only
    // e^{−ε̂} is consumed and ε̂ is tiny exactly where it cancels.
    let eps_hat = 0.5 * (a + b);
    // t = ŵ/μ = −γ − Σ_{k odd ≥ 3} ζ(k) μ^{k−1}/k.  The ζ series keeps full
    // relative accuracy where lnΓ(1±μ) ≈ ∓γμ makes a − b ill-conditioned.
    let t = if mu.abs() < 0.25 {
        // Coefficients −ζ(k)/k for k = 3, 5, …, 27; the first omitted term
        // is below ζ(29)·0.25²⁸/29 ≈ 5e-19.
        const COEF: [f64; 13] = [
            -1.202_056_903_159_594_3 / 3.0,
            -1.036_927_755_143_370_0 / 5.0,
            -1.008_349_277_381_922_8 / 7.0,
            -1.002_008_392_826_082_2 / 9.0,
            -1.000_494_188_604_119_5 / 11.0,
            -1.000_122_713_347_578_5 / 13.0,
            -1.000_030_588_236_307_0 / 15.0,
            -1.000_007_637_197_637_9 / 17.0,
            -1.000_001_908_212_716_6 / 19.0,
            -1.000_000_476_932_986_8 / 21.0,
            -1.000_000_119_219_925_9 / 23.0,
            -1.000_000_029_803_503_5 / 25.0,
            -1.000_000_007_450_711_8 / 27.0,
        ];
        let m2 = mu * mu;
        let mut acc = 0.0;
        for &coef in COEF.iter().rev() {
            acc = (acc + coef) * m2;
        }
        -EULER_GAMMA + acc
    } else {
        0.5 * (a - b) / mu
    };
    let w_hat = t * mu;
    let scale = (-eps_hat).exp();
    let gam1 = scale * t * sinhc(w_hat);
    let gam2 = scale * w_hat.cosh();
    (gam1, gam2, eps_hat, w_hat)
}

/// z / sin(z), full precision through z = 0.
fn inv_sinc(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 * (1.0 / 6.0 + z2 * (7.0 / 360.0))
    } else {
        z / z.sin()
    }
}

/// sinh(z) / z, full precision through z = 0.
fn sinhc(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        let z2 = z * z;
        1.0 + z2 * (1.0 / 6.0 + z2 / 120.0)
    } else {
        z.sinh() / z
    }
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(got: f64, want: f64, tol: f64, label: &str) {
        let rel = (got - want).abs() / want.abs();
        assert!(rel <= tol, "{label}: got {got:e}, want {want:e}, rel {rel:e}");
    }

    /// Reference grid spanning both branches, |μ| across [−1/2, 1/2], and
    /// recurrence depths from 0 to 10 (values from 30-digit arithmetic).
    const GRID: &[(f64, f64, f64)] = &[
        (0.0, 0.001, 7.023688800562381343612),
        (0.0, 0.5, 0.9244190712276658617819),
        (0.0, 1.999, 0.1140338305892329241387),
        (0.0, 2.001, 0.1137540987366846115982),
        (0.0, 50.0, 3.410167749789495513921e-23),
        (0.0, 600.0, 1.355828530994852437609e-262),
        (0.296, 0.001, 14.16133213595462127239),
        (0.296, 0.5, 0.9750644948291910663288),
        (0.296, 1.999, 0.1161231549500714866665),
        (0.296, 2.001, 0.1158365073804623181414),
        (0.296, 50.0, 3.413127626683925977754e-23),
        (0.296, 600.0, 1.355927445815249016652e-262),
        (0.5, 0.001, 39.59365951311664361351),
        (0.5, 0.5, 1.075047603499920238723),
        (0.5, 1.999, 0.1200877954314500688519),
        (0.5, 2.001, 0.1197879508997077253648),
        (0.5, 50.0, 3.418620095457074635573e-23),
        (0.5, 600.0, 1.356110789669311085906e-262),
        (1.0, 0.001, 999.996238156085574278),
        (1.0, 0.5, 1.656441120003300893696),
        (1.0, 1.999, 0.1400498420771096828985),
        (1.0, 2.001, 0.1396821883017675349613),
        (1.0, 50.0, 3.444102226717555612592e-23),
        (1.0, 600.0, 1.356957918112806086854e-262),
        (1.296, 0.001, 8519.667674411009215924),
        (1.296, 0.5, 2.396994943963364061901),
        (1.296, 1.999, 0.1607088845623976126416),
        (1.296, 2.001, 0.1602689314831683951789),
        (1.296, 50.0, 3.467355922347565739723e-23),
        (1.296, 600.0, 1.357726004261567806799e-262),
        (2.3, 0.001, 22819311.68252043017213),
        (2.3, 0.5, 13.50965388130364434764),
        (2.3, 1.999, 0.3256438579438057419239),
        (2.3, 2.001, 0.3245744585561598177743),
        (2.3, 5.7, 0.002634023902650232274261),
        (2.3, 50.0, 3.59352924578595821612e-23),
        (2.3, 100.0, 4.780808423653453881507e-45),
        (2.3, 600.0, 1.361813667574236738471e-262),
        (3.296, 0.001, 101405111335.1456011108),
        (3.296, 0.5, 125.4725713792984870778),
        (3.296, 1.999, 0.9061475194671484231219),
        (3.296, 2.001, 0.9025188940383564289308),
        (3.296, 50.0, 3.797325595198588980202e-23),
        (3.296, 600.0, 1.368148258660450476932e-262),
        (5.5, 0.001, 3.745344088163004714534e19),
        (5.5, 0.5, 52861.16571169457805824),
        (5.5, 1.999, 21.15284217291980003394),
        (5.5, 2.001, 21.02798480642406504925),
        (5.5, 50.0, 4.599801964889731703593e-23),
        (5.5, 600.0, 1.390411738511576790189e-262),
        (10.25, 0.001, 2.188700628506600268623e39),
        (10.25, 0.1, 6.919408956754450553144e18),
        (10.25, 0.5, 470771982004.5398927684),
        (10.25, 1.999, 288570.8859850694771075),
        (10.25, 2.001, 285567.1766619249850017),
        (10.25, 50.0, 9.618327010234690420053e-23),
        (10.25, 600.0, 1.479774728338832531679e-262),
        (0.296, 0.01, 6.825012115268557464936),
        (1.296, 0.01, 430.9115179313274148057),
        (0.0, 700.0, 4.669776431685376880986e-306),
        (1.296, 702.0, 6.31839816013215616078e-307),
    ];

    #[test]
    fn matches_reference_grid() {
        for &(nu, x, want) in GRID {
            let got = bessel_k(nu, x).unwrap();
            rel_close(got, want, 1e-12, &format!("K_{nu}({x})"));
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        // K_{1/2} = √(π/2x) e^{−x}; K_{3/2} and K_{5/2} add polynomial factors.
        for &x in &[0.07, 0.5, 1.0, 3.0, 10.0, 50.0] {
            let base = (std::f64::consts::PI / (2.0 * x)).sqrt() * (-x).exp();
            rel_close(bessel_k(0.5, x).unwrap(), base, 1e-13, "K_1/2");
            rel_close(bessel_k(1.5, x).unwrap(), base * (1.0 + 1.0 / x), 1e-13, "K_3/2");
            rel_close(
                bessel_k(2.5, x).unwrap(),
                base * (1.0 + 3.0 / x + 3.0 / (x * x)),
                1e-13,
                "K_5/2",
            );
        }
    }

    #[test]
    fn even_in_order() {
        for &(nu, x) in &[(0.296, 0.7), (1.296, 3.3), (2.3, 0.01), (5.5, 40.0)] {
            assert_eq!(bessel_k(-nu, x).unwrap(), bessel_k(nu, x).unwrap());
        }
    }

    #[test]
    fn satisfies_upward_recurrence() {
        // K_{ν+1} = K_{ν−1} + (2ν/x) K_ν across branch boundaries.
        for &(nu, x) in &[(1.3, 0.4), (2.3, 1.7), (2.3, 7.1), (0.7, 2.5), (4.1, 60.0)] {
            let km = bessel_k(nu - 1.0, x).unwrap();
            let k0 = bessel_k(nu, x).unwrap();
            let kp = bessel_k(nu + 1.0, x).unwrap();
            rel_close(kp, km + (2.0 * nu / x) * k0, 1e-12, "recurrence");
        }
    }

    #[test]
    fn small_argument_logarithmic_and_power_laws() {
        // K_0(x) → −ln(x/2) − γ and K_ν(x) → ½Γ(ν)(2/x)^ν for small x.
        let x = 1e-8;
        rel_close(
            bessel_k(0.0, x).unwrap(),
            -(0.5 * x).ln() - EULER_GAMMA,
            1e-12,
            "K_0 log law",
        );
        let nu = 0.42;
        let want = 0.5 * statrs::function::gamma::gamma(nu) * (2.0 / x).powf(nu);
        rel_close(bessel_k(nu, x).unwrap(), want, 1e-6, "K_ν power law");
    }

    #[test]
    fn extreme_magnitudes_flush_and_saturate() {
        // Beyond e^{−x} representability the result flushes to exactly zero.
        assert_eq!(bessel_k(0.0, 800.0).unwrap(), 0.0);
        // Enormous order at tiny argument saturates rather than erroring.
        assert_eq!(bessel_k(300.0, 0.001).unwrap(), f64::INFINITY);
    }

    #[test]
    fn rejects_invalid_arguments() {
        assert!(bessel_k(0.3, 0.0).is_err());
        assert!(bessel_k(0.3, -1.0).is_err());
        assert!(bessel_k(0.3, f64::NAN).is_err());
        assert!(bessel_k(0.3, f64::INFINITY).is_err());
        assert!(bessel_k(f64::NAN, 1.0).is_err());
    }
}
