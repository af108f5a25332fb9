//! Modified Bessel function of the second kind, `K_ν(x)`.
//!
//! The order is split as `ν = μ + n` with `|μ| ≤ 1/2`. `K_μ` and `K_{μ+1}` come
//! from Temme's series for `x ≤ 2` and from Steed's continued fraction (CF2)
//! otherwise; upward recurrence in the order, which is stable for `K`, then
//! reaches `ν`. The gamma-function terms of Temme's series are evaluated from
//! the Taylor expansion of `1/Γ(z)`, which gives `Γ₁(μ)` without cancellation.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Taylor coefficients `c_k` of `1/Γ(z) = Σ c_k z^k`, `k = 1..=30`.
const RECIP_GAMMA: [f64; 30] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
    1.714_406_321_927_337_433_4e-20,
];

const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// Smallest and largest arguments of the public contract.
pub const BESSEL_X_MIN: f64 = 1e-10;
pub const BESSEL_X_MAX: f64 = 100.0;
pub const BESSEL_NU_MAX: f64 = 10.0;

/// `K_ν` for a fixed order, with every order-only quantity precomputed.
#[derive(Debug, Clone, Copy)]
pub struct BesselK {
    nu: f64,
    mu: f64,
    steps: usize,
    gam1: f64,
    gam2: f64,
    recip_gamma_plus: f64,
    recip_gamma_minus: f64,
}

impl BesselK {
    /// Accepts any finite `ν ≥ 0`; accuracy is only verified on `(0, 10]`.
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::Domain(format!("Bessel order {nu} must be finite and non-negative")));
        }
        let steps = (nu + 0.5).floor() as usize;
        let mu = nu - steps as f64;
        let (gam1, gam2, recip_gamma_plus, recip_gamma_minus) = temme_gammas(mu);
        Ok(Self { nu, mu, steps, gam1, gam2, recip_gamma_plus, recip_gamma_minus })
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    /// `K_ν(x)` for `x > 0`. Underflows to 0 for very large `x`.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x > 0.0);
        let (mut k_mu, mut k_mu1) = if x <= 2.0 { self.temme(x) } else { self.steed(x) };
        let two_over_x = 2.0 / x;
        for i in 1..=self.steps {
            let next = (self.mu + i as f64) * two_over_x * k_mu1 + k_mu;
            k_mu = k_mu1;
            k_mu1 = next;
        }
        k_mu
    }

    fn temme(&self, x: f64) -> (f64, f64) {
        let mu = self.mu;
        let half_x = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -half_x.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let mut ff = fact * (self.gam1 * e.cosh() + self.gam2 * fact2 * d);
        let mut sum = ff;
        let e = e.exp();
        let mut p = 0.5 * e / self.recip_gamma_plus;
        let mut q = 0.5 / (e * self.recip_gamma_minus);
        let mut c = 1.0;
        let dd = half_x * half_x;
        let mut sum1 = p;
        for i in 1..MAX_ITER {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu * mu);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - fi * ff);
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        (sum, sum1 * 2.0 / x)
    }

    fn steed(&self, x: f64) -> (f64, f64) {
        let mu = self.mu;
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu * mu;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAX_ITER {
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
            if (dels / s).abs() < EPS {
                break;
            }
        }
        let h = a1 * h;
        let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
        let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
        (k_mu, k_mu1)
    }
}

/// `Γ₁(μ)`, `Γ₂(μ)`, `1/Γ(1+μ)`, `1/Γ(1−μ)` for `|μ| ≤ 1/2`.
///
/// With `1/Γ(1+z) = Σ c_k z^{k−1}` the odd part gives `Γ₁ = −Σ_{k even} c_k μ^{k−2}`
/// and the even part gives `Γ₂ = Σ_{k odd} c_k μ^{k−1}`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut plus = 0.0;
    let mut minus = 0.0;
    let mu2 = mu * mu;
    // Horner from the top coefficient down
    for (idx, &c) in RECIP_GAMMA.iter().enumerate().rev() {
        let k = idx + 1;
        if k % 2 == 0 {
            gam1 = gam1 * mu2 - c;
        } else {
            gam2 = gam2 * mu2 + c;
        }
        plus = plus * mu + c;
        minus = minus * -mu + c;
    }
    (gam1, gam2, plus, minus)
}

/// `K_ν(x)` on the supported band `ν ∈ (0, 10]`, `x ∈ (1e-10, 100]`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(nu > 0.0 && nu <= BESSEL_NU_MAX) {
        return Err(Error::Domain(format!("Bessel order {nu} outside (0, {BESSEL_NU_MAX}]")));
    }
    if !(x > BESSEL_X_MIN && x <= BESSEL_X_MAX) {
        return Err(Error::Domain(format!(
            "Bessel argument {x} outside ({BESSEL_X_MIN:e}, {BESSEL_X_MAX}]"
        )));
    }
    Ok(BesselK::new(nu)?.eval(x))
}
