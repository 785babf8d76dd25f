//! Adaptive 21-point Gauss–Kronrod integration of complex-valued functions.

// Nodes and weights are kept as published.
#![allow(clippy::excessive_precision)]

use num::complex::Complex64;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_478_126,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// One sample of the integrand. `carried` is the error already present in
/// `value` (nonzero when the value is itself an inner integral).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Sample {
    pub value: Complex64,
    pub carried: f64,
    pub evaluations: usize,
}

impl Sample {
    pub fn exact(value: Complex64) -> Self {
        Self {
            value,
            carried: 0.0,
            evaluations: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Estimate {
    pub value: Complex64,
    pub error: f64,
    pub carried: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl Estimate {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            carried: 0.0,
            evaluations: 0,
            converged: true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
    carried: f64,
}

fn rule<F: FnMut(f64) -> Sample>(f: &mut F, a: f64, b: f64, evaluations: &mut usize) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut values = [Complex64::new(0.0, 0.0); 21];
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    let mut carried = 0.0;

    let mut take = |x: f64, weight: f64, evaluations: &mut usize| {
        let sample = f(x);
        *evaluations += sample.evaluations;
        carried += weight * sample.carried;
        sample.value
    };

    let fc = take(center, WGK[10], evaluations);
    values[20] = fc;
    kronrod += fc * WGK[10];
    abs_sum += WGK[10] * fc.norm();
    for k in 0..10 {
        let dx = half * XGK[k];
        let f1 = take(center - dx, WGK[k], evaluations);
        let f2 = take(center + dx, WGK[k], evaluations);
        values[2 * k] = f1;
        values[2 * k + 1] = f2;
        kronrod += (f1 + f2) * WGK[k];
        abs_sum += WGK[k] * (f1.norm() + f2.norm());
        if k % 2 == 1 {
            gauss += (f1 + f2) * WG[k / 2];
        }
    }

    let mean = kronrod * 0.5;
    let mut asc = WGK[10] * (fc - mean).norm();
    for k in 0..10 {
        asc += WGK[k] * ((values[2 * k] - mean).norm() + (values[2 * k + 1] - mean).norm());
    }

    let scale = half.abs();
    let abs_integral = abs_sum * scale;
    let asc = asc * scale;
    let mut error = ((kronrod - gauss) * half).norm();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_integral > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_integral);
    }

    Segment {
        a,
        b,
        value: kronrod * half,
        error,
        carried: carried * scale,
    }
}

/// Bisects the segment with the largest error until the summed error meets
/// `max(abs_tol, rel_tol * |value|)` or `max_subdivisions` segments exist.
pub(crate) fn integrate<F>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_subdivisions: usize,
) -> Estimate
where
    F: FnMut(f64) -> Sample,
{
    if a == b {
        return Estimate::zero();
    }
    let mut evaluations = 0;
    let mut segments = vec![rule(&mut f, a, b, &mut evaluations)];
    let converged = loop {
        let value: Complex64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if error <= abs_tol.max(rel_tol * value.norm()) {
            break true;
        }
        if segments.len() >= max_subdivisions {
            break false;
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .unwrap();
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            segments.push(seg);
            break false;
        }
        segments.push(rule(&mut f, seg.a, mid, &mut evaluations));
        segments.push(rule(&mut f, mid, seg.b, &mut evaluations));
    };
    Estimate {
        value: segments.iter().map(|s| s.value).sum(),
        error: segments.iter().map(|s| s.error).sum(),
        carried: segments.iter().map(|s| s.carried).sum(),
        evaluations,
        converged,
    }
}
