//! The 10-point Gauss / 21-point Kronrod pair.

#![allow(clippy::excessive_precision)]

/// Kronrod abscissae on [0, 1); odd indices are the Gauss nodes.
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

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

pub const NODES: usize = 21;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PanelEstimate {
    pub value: f64,
    pub error: f64,
    /// Every node value was finite.
    pub finite: bool,
}

/// Kronrod value on [a, b] with the usual QUADPACK error estimate.
pub fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> PanelEstimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut gauss = 0.0;
    let mut kronrod = WGK[10] * fc;
    let mut res_abs = kronrod.abs();
    for j in 0..10 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        fv1[j] = f1;
        fv2[j] = f2;
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
        kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
    }
    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * h;
    let res_abs = res_abs * h.abs();
    let res_asc = res_asc * h.abs();
    let mut error = ((kronrod - gauss) * h).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(floor);
    }
    let finite = value.is_finite() && error.is_finite();
    PanelEstimate { value, error, finite }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_and_polynomials() {
        let k: f64 = WGK[10] + 2.0 * WGK[..10].iter().sum::<f64>();
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15 && (g - 2.0).abs() < 1e-15);
        // the Kronrod rule is exact to degree 31
        let p = |x: f64| x.powi(30) + 3.0 * x.powi(7);
        let r = gk21(&p, -1.0, 1.0);
        assert!((r.value - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn sine_and_error_honesty() {
        let r = gk21(&f64::sin, 0.0, std::f64::consts::PI);
        assert!((r.value - 2.0).abs() < 1e-14);
        let r = gk21(&|x: f64| (40.0 * x).cos(), 0.0, 3.0);
        let truth = (120.0f64).sin() / 40.0;
        assert!((r.value - truth).abs() <= r.error);
        assert!(r.finite);
        assert!(!gk21(&|x: f64| if x == 0.5 { f64::NAN } else { x }, 0.0, 1.0).finite);
    }
}
