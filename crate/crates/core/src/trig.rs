//! Branchless `sin`/`cos` for the mode sums.
//!
//! Cody-Waite reduction by `pi/2` followed by the fdlibm kernel polynomials on
//! `[-pi/4, pi/4]`. Accurate to a few ulp for `|x| < 2^20`, which covers every
//! phase `omega * t` the simulator evaluates. Written without branches so the
//! per-mode loop vectorizes.

const FRAC_2_PI: f64 = std::f64::consts::FRAC_2_PI;
const ROUND_MAGIC: f64 = 6_755_399_441_055_744.0;
// pi/2 split so that k * PIO2_1 and k * PIO2_2 are exact for |k| < 2^20.
const PIO2_1: f64 = 1.570_796_326_734_125_614_17;
const PIO2_2: f64 = 6.077_100_506_303_965_976_6e-11;
const PIO2_3: f64 = 2.022_266_248_795_950_732_4e-21;

const S1: f64 = -1.666_666_666_666_663_243_48e-01;
const S2: f64 = 8.333_333_333_322_489_461_24e-03;
const S3: f64 = -1.984_126_982_985_794_931_34e-04;
const S4: f64 = 2.755_731_370_707_006_767_89e-06;
const S5: f64 = -2.505_076_025_340_686_341_95e-08;
const S6: f64 = 1.589_690_995_211_550_102_21e-10;

const C1: f64 = 4.166_666_666_666_660_190_37e-02;
const C2: f64 = -1.388_888_888_887_410_957_49e-03;
const C3: f64 = 2.480_158_728_947_672_941_78e-05;
const C4: f64 = -2.755_731_435_139_066_330_35e-07;
const C5: f64 = 2.087_572_321_298_174_827_90e-09;
const C6: f64 = -1.135_964_755_778_819_482_65e-11;

#[inline(always)]
fn kernel(r: f64) -> (f64, f64) {
    let z = r * r;
    let s = r + r * z * (S1 + z * (S2 + z * (S3 + z * (S4 + z * (S5 + z * S6)))));
    let c = 1.0 - 0.5 * z + z * z * (C1 + z * (C2 + z * (C3 + z * (C4 + z * (C5 + z * C6)))));
    (s, c)
}

/// `(sin x, cos x)`.
#[inline(always)]
pub fn sin_cos(x: f64) -> (f64, f64) {
    // Adding 1.5 * 2^52 rounds to the nearest integer and leaves it in the low mantissa bits.
    let shifted = x * FRAC_2_PI + ROUND_MAGIC;
    let q = (shifted.to_bits() & 3) as u32;
    let k = shifted - ROUND_MAGIC;
    let r = ((x - k * PIO2_1) - k * PIO2_2) - k * PIO2_3;
    let (s, c) = kernel(r);
    let (a, b) = if q & 1 == 1 { (c, s) } else { (s, c) };
    let a = if q & 2 == 2 { -a } else { a };
    let b = if (q + 1) & 2 == 2 { -b } else { b };
    (a, b)
}
