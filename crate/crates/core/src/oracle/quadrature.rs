//! Adaptive Gauss-Kronrod (7/15) quadrature on a pure bisection tree.

use super::QuadratureControl;
use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

struct Estimate {
    value: f64,
    error: f64,
    abs_value: f64,
}

fn kronrod15<F: Fn(f64) -> f64>(g: &F, a: f64, b: f64) -> Estimate {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = g(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_value = fc.abs() * WGK[7];
    let mut fv = [0.0; 14];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = g(center - dx);
        let f2 = g(center + dx);
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs_value += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    // QUADPACK's error scaling
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv[2 * j] - mean).abs() + (fv[2 * j + 1] - mean).abs());
    }
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    Estimate { value: kronrod * half, error, abs_value: abs_value * half.abs() }
}

fn refine<F: Fn(f64) -> f64>(
    g: &F,
    a: f64,
    b: f64,
    whole: Estimate,
    tol: f64,
    depth: usize,
    max_depth: usize,
) -> Result<f64> {
    if !whole.value.is_finite() {
        return Err(Error::Integration(format!("non-finite integrand on [{a}, {b}]")));
    }
    let roundoff = 50.0 * f64::EPSILON * whole.abs_value;
    if whole.error <= tol.max(roundoff) {
        return Ok(whole.value);
    }
    if depth >= max_depth {
        return Err(Error::Integration(format!(
            "bisection depth {max_depth} exhausted on [{a}, {b}] (error estimate {:e})",
            whole.error
        )));
    }
    let mid = 0.5 * (a + b);
    let left = kronrod15(g, a, mid);
    let right = kronrod15(g, mid, b);
    Ok(refine(g, a, mid, left, 0.5 * tol, depth + 1, max_depth)?
        + refine(g, mid, b, right, 0.5 * tol, depth + 1, max_depth)?)
}

/// `∫_lower^upper g(x) dx` to `ctl.abs_tol`.
///
/// Each interval either meets its share of the tolerance or is bisected, the
/// share halving with each level; the left half is always resolved before the
/// right, so results are reproducible bit for bit.
pub fn integrate<F: Fn(f64) -> f64>(g: F, lower: f64, upper: f64, ctl: &QuadratureControl) -> Result<f64> {
    if !(lower.is_finite() && upper.is_finite()) {
        return Err(Error::Domain(format!("integration bounds must be finite, got [{lower}, {upper}]")));
    }
    if upper < lower {
        return Ok(-integrate(g, upper, lower, ctl)?);
    }
    if upper == lower {
        return Ok(0.0);
    }
    let whole = kronrod15(&g, lower, upper);
    refine(&g, lower, upper, whole, ctl.abs_tol, 0, ctl.max_depth)
}

/// `∫_0^upper g(x) dx` for integrands carrying a factor like `x^s` (`0 < s < 1`)
/// at the origin, where `kink` is the smallest such exponent.
///
/// With `x = u^m` and `m ≥ 2/s` the singular factor becomes `u^{ms} ≥ u²`,
/// which the rule resolves quickly. `kink ≥ 1` integrates in `x` directly.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(
    g: F,
    upper: f64,
    kink: f64,
    ctl: &QuadratureControl,
) -> Result<f64> {
    let m = substitution_power(kink);
    if m == 1 {
        return integrate(g, 0.0, upper, ctl);
    }
    let mf = m as f64;
    let u_max = upper.powf(1.0 / mf);
    integrate(
        |u: f64| {
            if u == 0.0 {
                return 0.0;
            }
            mf * u.powi(m - 1) * g(u.powi(m))
        },
        0.0,
        u_max,
        ctl,
    )
}

fn substitution_power(kink: f64) -> i32 {
    if !(kink > 0.0) || kink >= 1.0 {
        1
    } else {
        ((2.0 / kink).ceil() as i32).clamp(2, 12)
    }
}
