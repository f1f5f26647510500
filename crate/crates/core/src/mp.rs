//! Thin multi-precision layer over `astro-float` used by the monic chain
//! construction. Only the handful of operations the chain needs are exposed.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};

const RM: RoundingMode = RoundingMode::ToEven;

/// Working context: a precision in bits plus the constant cache.
pub(crate) struct Mp {
    prec: usize,
    consts: Consts,
}

impl Mp {
    pub(crate) fn new(prec: usize) -> Self {
        // Consts::new only fails on allocation failure.
        let consts = Consts::new().expect("astro-float constant cache");
        // Round up to whole words, astro-float works in 64-bit limbs.
        let prec = prec.div_ceil(64).max(2) * 64;
        Mp { prec, consts }
    }

    pub(crate) fn prec(&self) -> usize {
        self.prec
    }

    pub(crate) fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.prec)
    }

    pub(crate) fn from_usize(&self, k: usize) -> BigFloat {
        BigFloat::from_u64(k as u64, self.prec)
    }

    pub(crate) fn add(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.add(y, self.prec, RM)
    }

    pub(crate) fn sub(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.sub(y, self.prec, RM)
    }

    pub(crate) fn mul(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.mul(y, self.prec, RM)
    }

    pub(crate) fn div(&self, x: &BigFloat, y: &BigFloat) -> BigFloat {
        x.div(y, self.prec, RM)
    }

    pub(crate) fn sqrt(&self, x: &BigFloat) -> BigFloat {
        x.sqrt(self.prec, RM)
    }

    pub(crate) fn exp(&mut self, x: &BigFloat) -> BigFloat {
        x.exp(self.prec, RM, &mut self.consts)
    }

    pub(crate) fn pi(&mut self) -> BigFloat {
        self.consts.pi(self.prec, RM)
    }

    /// `exp(-c x^2)` for finite `x`.
    pub(crate) fn gaussian(&mut self, c: &BigFloat, x: &BigFloat) -> BigFloat {
        let arg = self.mul(c, &self.mul(x, x)).neg();
        self.exp(&arg)
    }

    /// `∫_0^x exp(-c t^2) dt`, odd in `x`.
    ///
    /// Uses `x e^{-cx^2} Σ (2cx^2)^n / (2n+1)!!`, whose terms are all positive,
    /// so the only loss is the final subtraction done by the caller.
    pub(crate) fn gauss_partial(&mut self, c: &BigFloat, x: &BigFloat) -> BigFloat {
        if x.is_zero() {
            return self.from_f64(0.0);
        }
        let z = self.mul(&self.from_f64(2.0), &self.mul(c, &self.mul(x, x)));
        let mut term = self.from_f64(1.0);
        let mut sum = self.from_f64(1.0);
        let mut n = 0usize;
        loop {
            n += 1;
            let denom = self.from_usize(2 * n + 1);
            term = self.div(&self.mul(&term, &z), &denom);
            let next = self.add(&sum, &term);
            // Stop once the term no longer moves the sum at working precision.
            let rel = self.div(&term, &next);
            sum = next;
            if let Some(e) = rel.exponent() {
                if (e as i64) < -(self.prec as i64) - 4 {
                    break;
                }
            } else {
                break;
            }
            if n > 100_000 {
                break;
            }
        }
        let g = self.gaussian(c, x);
        self.mul(&self.mul(x, &g), &sum)
    }

    /// `∫_a^b exp(-c t^2) dt` with either endpoint possibly infinite.
    pub(crate) fn gauss_mass(&mut self, c: f64, a: f64, b: f64) -> BigFloat {
        let cb = self.from_f64(c);
        let pi = self.pi();
        let half_total = self.div(&self.sqrt(&self.div(&pi, &cb)), &self.from_f64(2.0));
        let prim = |mp: &mut Mp, x: f64| -> BigFloat {
            if x == f64::INFINITY {
                half_total.clone()
            } else if x == f64::NEG_INFINITY {
                half_total.neg()
            } else {
                let xb = mp.from_f64(x);
                mp.gauss_partial(&cb, &xb)
            }
        };
        let hi = prim(self, b);
        let lo = prim(self, a);
        self.sub(&hi, &lo)
    }
}

/// Round a big float to the nearest `f64` (to within one ulp).
pub(crate) fn to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    let Some((words, _, sign, exp, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *words.last().unwrap_or(&0);
    let next = if words.len() >= 2 { words[words.len() - 2] } else { 0 };
    // mantissa in [0.5, 1)
    let frac = (top as f64 + next as f64 / 18446744073709551616.0) / 18446744073709551616.0;
    let mag = scale_pow2(frac, exp as i64);
    if matches!(sign, Sign::Neg) {
        -mag
    } else {
        mag
    }
}

fn scale_pow2(mut v: f64, mut e: i64) -> f64 {
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}
