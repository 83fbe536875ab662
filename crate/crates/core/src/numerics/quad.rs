//! Adaptive Gauss–Kronrod quadrature over finite and half-infinite
//! intervals.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule (G7–K15) is
//! applied per segment; the segment with the largest error estimate is
//! bisected until the global estimate meets the requested tolerance.
//! Half-infinite domains `[a, ∞)` are mapped to `[0, 1)` through
//! `x = a + t/(1−t)` before subdivision — every integrand in this crate
//! carries an exponential or power tail that the mapping compresses onto a
//! finite interval, and the Kronrod nodes are interior so the endpoint
//! `t = 1` is never evaluated.
//!
//! Failure to converge is reported as [`Error::NonConvergence`] carrying the
//! best estimate; a silently wrong answer is never returned.

use crate::error::{Error, Result};
use std::collections::BinaryHeap;

// ── G7–K15 rule constants ────────────────────────────────────────────────

/// Kronrod abscissae on [0, 1] (positive half; the rule is symmetric).
/// Odd indices are the embedded Gauss points; index 7 is the midpoint.
const XGK: [f64; 7] = [
    0.991_455_371_120_812_639_206_854_697_526_33,
    0.949_107_912_342_758_524_526_189_684_047_85,
    0.864_864_423_359_769_072_789_712_788_640_93,
    0.741_531_185_599_394_439_863_864_773_280_79,
    0.586_087_235_467_691_130_294_144_838_258_73,
    0.405_845_151_377_397_166_906_606_412_076_96,
    0.207_784_955_007_898_467_600_689_403_773_24,
];

/// Kronrod weights matching `XGK`; the last entry weighs the midpoint.
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_97,
    0.063_092_092_629_978_553_290_700_663_189_20,
    0.104_790_010_322_250_183_839_876_322_541_52,
    0.140_653_259_715_525_918_745_189_590_510_24,
    0.169_004_726_639_267_902_826_583_426_598_55,
    0.190_350_578_064_785_409_913_256_402_421_01,
    0.204_432_940_075_298_892_414_161_999_234_65,
    0.209_482_141_084_727_828_012_999_174_891_71,
];

/// Gauss-7 weights for `XGK[1]`, `XGK[3]`, `XGK[5]`, and the midpoint.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_08,
    0.279_705_391_489_276_667_901_467_771_423_78,
    0.381_830_050_505_118_944_950_369_775_488_97,
    0.417_959_183_673_469_387_755_102_040_816_33,
];

// ── Public types ─────────────────────────────────────────────────────────

/// How a half-infinite upper limit is handled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailPolicy {
    /// Map `[a, ∞)` to `[0, 1)` via `x = a + t/(1−t)` (default; exact).
    Transform,
    /// Truncate the integral at `a + cutoff` (caller owns the tail bound).
    Cutoff(f64),
}

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance on the integral value.
    pub abs_tol: f64,
    /// Relative tolerance on the integral value.
    pub rel_tol: f64,
    /// Maximum number of segment bisections before giving up.
    pub max_subdivisions: usize,
    /// Treatment of `[a, ∞)` domains.
    pub tail: TailPolicy,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-9,
            rel_tol: 1e-8,
            max_subdivisions: 256,
            tail: TailPolicy::Transform,
        }
    }
}

impl QuadratureSpec {
    /// Spec with looser tolerances, for integrands that are themselves
    /// computed by an inner quadrature (keeps nested work bounded).
    pub fn relaxed(abs_tol: f64, rel_tol: f64) -> Self {
        QuadratureSpec {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::invalid("QuadratureSpec", "tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("QuadratureSpec", "max_subdivisions must be ≥ 1"));
        }
        Ok(())
    }
}

/// Upper integration limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperLimit {
    Finite(f64),
    Infinite,
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

// ── Kronrod panel ────────────────────────────────────────────────────────

struct Panel {
    value: f64,
    error: f64,
}

/// QUADPACK-style error rescaling: sharpen the raw `|K15 − G7|` difference
/// against the deviation integral `resasc`, with a roundoff floor from the
/// absolute integral `resabs`.
fn rescale_error(raw: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = raw.abs();
    if resasc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / resasc).powf(1.5);
        err = if scale < 1.0 { resasc * scale } else { resasc };
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// One G7–K15 evaluation over [a, b]. Errors out on a non-finite integrand
/// value — the contract requires f finite on the open interior.
fn kronrod_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = fc.abs() * WGK[7];
    let mut values = [0.0f64; 15];
    values[14] = fc;

    for (j, &x) in XGK.iter().enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        values[2 * j] = f1;
        values[2 * j + 1] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    if !res_k.is_finite() {
        return Err(Error::domain(
            "integrate",
            format!("integrand produced a non-finite value on [{a:e}, {b:e}]"),
        ));
    }

    // Deviation integral of |f − mean| for the rescaled error estimate.
    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for (j, pair) in values.chunks_exact(2).enumerate() {
        res_asc += WGK[j] * ((pair[0] - mean).abs() + (pair[1] - mean).abs());
    }

    let habs = half.abs();
    Ok(Panel {
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * habs, res_asc * habs),
    })
}

// ── Adaptive driver ──────────────────────────────────────────────────────

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature> {
    let first = kronrod_panel(f, a, b)?;
    let mut heap = BinaryHeap::new();
    let mut total_value = first.value;
    let mut total_error = first.error;
    heap.push(Segment {
        a,
        b,
        value: first.value,
        error: first.error,
    });

    let mut subdivisions = 0usize;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total_value.abs());
        if total_error <= tol {
            return Ok(Quadrature {
                value: total_value,
                error_estimate: total_error,
                subdivisions,
            });
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(Error::NonConvergence {
                value: total_value,
                error: total_error,
                subdivisions,
            });
        }

        // Split the segment with the largest error estimate.
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval hit floating-point resolution; its error estimate
            // cannot be improved further.
            return Err(Error::NonConvergence {
                value: total_value,
                error: total_error,
                subdivisions,
            });
        }
        let left = kronrod_panel(f, worst.a, mid)?;
        let right = kronrod_panel(f, mid, worst.b)?;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: left.value,
            error: left.error,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: right.value,
            error: right.error,
        });
        subdivisions += 1;

        // Re-sum occasionally so incremental updates cannot drift.
        if subdivisions % 64 == 0 {
            total_value = heap.iter().map(|s| s.value).sum();
            total_error = heap.iter().map(|s| s.error).sum();
        }
    }
}

// ── Public entry points ──────────────────────────────────────────────────

/// Integrate `f` from `a` to `b` (possibly infinite) under `spec`.
///
/// Integrable endpoint singularities are allowed; the integrand must be
/// finite on the open interior. Non-convergence within the subdivision
/// budget is an error carrying the best estimate, never a silent result.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: UpperLimit,
    spec: &QuadratureSpec,
) -> Result<Quadrature> {
    spec.validate()?;
    if !a.is_finite() {
        return Err(Error::domain("integrate", "lower limit must be finite"));
    }
    match b {
        UpperLimit::Finite(b) => {
            if !b.is_finite() {
                return Err(Error::domain("integrate", "upper limit must be finite or Infinite"));
            }
            if b < a {
                return Err(Error::domain("integrate", "reversed interval"));
            }
            if b == a {
                return Ok(Quadrature {
                    value: 0.0,
                    error_estimate: 0.0,
                    subdivisions: 0,
                });
            }
            adaptive(&f, a, b, spec)
        }
        UpperLimit::Infinite => match spec.tail {
            TailPolicy::Cutoff(cut) => {
                if !(cut > 0.0) || !cut.is_finite() {
                    return Err(Error::invalid("TailPolicy::Cutoff", "cutoff must be positive and finite"));
                }
                adaptive(&f, a, a + cut, spec)
            }
            TailPolicy::Transform => {
                // x = a + t/(1−t), dx = dt/(1−t)²; t ∈ [0, 1), nodes interior.
                let g = |t: f64| {
                    let om = 1.0 - t;
                    let x = a + t / om;
                    f(x) / (om * om)
                };
                adaptive(&g, 0.0, 1.0, spec)
            }
        },
    }
}

/// Convenience: finite-interval integral value.
pub fn integrate_finite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate(f, a, UpperLimit::Finite(b), spec).map(|q| q.value)
}

/// Convenience: `[a, ∞)` integral value.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate(f, a, UpperLimit::Infinite, spec).map(|q| q.value)
}

// ── Tests ────────────────────────────────────────────────────────────────

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn exponential_tail_is_exact() {
        let q = integrate(|x| (-x).exp(), 0.0, UpperLimit::Infinite, &spec()).unwrap();
        assert!((q.value - 1.0).abs() < 1e-12, "got {}", q.value);
        assert!(q.error_estimate < 1e-8);
    }

    #[test]
    fn rayleigh_density_normalizes() {
        let lambda = 0.25;
        let q = integrate(
            |r| 2.0 * PI * lambda * r * (-PI * lambda * r * r).exp(),
            0.0,
            UpperLimit::Infinite,
            &spec(),
        )
        .unwrap();
        assert!((q.value - 1.0).abs() < 1e-11);
    }

    #[test]
    fn power_rule_on_unit_interval() {
        // ∫₀¹ x^{g²−1} dx = 1/g² with g² = 2.5; the fractional power has
        // a derivative singularity at 0, so expect the requested tolerance
        // rather than machine precision.
        let v = integrate_finite(|x| x.powf(1.5), 0.0, 1.0, &spec()).unwrap();
        assert!((v - 0.4).abs() < 1e-9);
    }

    #[test]
    fn degree_seven_polynomial_is_exact_in_one_panel() {
        // G7 is exact through degree 13; a single panel must nail this.
        let q = integrate(
            |x| 7.0 * x.powi(6) - 3.0 * x.powi(4) + x - 2.0,
            -1.0,
            UpperLimit::Finite(2.0),
            &spec(),
        )
        .unwrap();
        // Antiderivative: x^7 − 0.6 x^5 + x²/2 − 2x.
        let exact = |x: f64| x.powi(7) - 0.6 * x.powi(5) + 0.5 * x * x - 2.0 * x;
        assert!((q.value - (exact(2.0) - exact(-1.0))).abs() < 1e-11);
        assert_eq!(q.subdivisions, 0);
    }

    #[test]
    fn sine_over_half_period() {
        let v = integrate_finite(f64::sin, 0.0, PI, &spec()).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gamma_kernel_third_moment() {
        let v = integrate_to_inf(|x| x.powi(3) * (-x).exp(), 0.0, &spec()).unwrap();
        assert!((v - 6.0).abs() < 1e-10);
    }

    #[test]
    fn gaussian_half_integral() {
        let v = integrate_to_inf(|x| (-0.5 * x * x).exp(), 0.0, &spec()).unwrap();
        assert!((v - (PI / 2.0).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn inverse_sqrt_endpoint_singularity() {
        // Integrable singularity at 0: ∫₀¹ x^{−1/2} dx = 2.
        let v = integrate_finite(|x| 1.0 / x.sqrt(), 0.0, 1.0, &spec()).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn bessel_weighted_integral() {
        // ∫₀^∞ K₀(x) dx = π/2.
        let v = integrate_to_inf(|x| crate::numerics::bessel::bessel_k(0.0, x).unwrap(), 1e-300, &spec()).unwrap();
        assert!((v - PI / 2.0).abs() < 1e-8, "got {v}");
    }

    #[test]
    fn bessel_mellin_moment() {
        // ∫₀^∞ x^μ K_ν(x) dx = 2^{μ−1} Γ((1+μ+ν)/2) Γ((1+μ−ν)/2), μ=1.3, ν=0.296.
        let (mu, nu) = (1.3, 0.296);
        let v = integrate_to_inf(
            |x| x.powf(mu) * crate::numerics::bessel::bessel_k(nu, x).unwrap(),
            1e-300,
            &spec(),
        )
        .unwrap();
        let g = |z: f64| crate::numerics::special::gamma_fn(z).unwrap();
        let exact = 2f64.powf(mu - 1.0) * g((1.0 + mu + nu) / 2.0) * g((1.0 + mu - nu) / 2.0);
        assert!((v - exact).abs() < 1e-9 * exact, "got {v}, want {exact}");
    }

    #[test]
    fn damped_oscillation() {
        // ∫₀^∞ sin(x) e^{−x} dx = 1/2.
        let v = integrate_to_inf(|x| x.sin() * (-x).exp(), 0.0, &spec()).unwrap();
        assert!((v - 0.5).abs() < 1e-11);
    }

    #[test]
    fn pathloss_tail_power_law() {
        // ∫₁^∞ x^{−3.5} dx = 0.4 — the interference tail shape.
        let v = integrate_to_inf(|x| x.powf(-3.5), 1.0, &spec()).unwrap();
        assert!((v - 0.4).abs() < 1e-10);
    }

    #[test]
    fn cutoff_policy_truncates_where_told() {
        let s = QuadratureSpec {
            tail: TailPolicy::Cutoff(5.0),
            ..QuadratureSpec::default()
        };
        let v = integrate(|x| (-x).exp(), 0.0, UpperLimit::Infinite, &s).unwrap();
        assert!((v.value - (1.0 - (-5.0f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn divergent_integral_reports_nonconvergence() {
        let err = integrate(|x| 1.0 / x, 0.0, UpperLimit::Finite(1.0), &spec()).unwrap_err();
        match err {
            Error::NonConvergence { subdivisions, .. } => assert!(subdivisions > 0),
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn non_finite_integrand_is_a_domain_error() {
        let err = integrate(|_| f64::NAN, 0.0, UpperLimit::Finite(1.0), &spec()).unwrap_err();
        assert!(matches!(err, Error::Domain { .. }));
    }

    #[test]
    fn reversed_interval_rejected() {
        assert!(integrate(|x| x, 1.0, UpperLimit::Finite(0.0), &spec()).is_err());
    }

    #[test]
    fn empty_interval_is_zero() {
        let q = integrate(|x| x, 2.0, UpperLimit::Finite(2.0), &spec()).unwrap();
        assert_eq!(q.value, 0.0);
    }
}
