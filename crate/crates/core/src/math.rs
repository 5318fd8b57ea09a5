//! Scalar math shims and the deterministic PRNG used for sampling.
//!
//! Under `std` the inherent `f64` methods are used; without it the same
//! operations route through `libm` so results stay available in `no_std`
//! builds.

use alloc::vec::Vec;

#[cfg(feature = "std")]
mod scalar {
    pub fn exp(x: f64) -> f64 {
        x.exp()
    }
    pub fn ln(x: f64) -> f64 {
        x.ln()
    }
    pub fn sqrt(x: f64) -> f64 {
        x.sqrt()
    }
    pub fn cos(x: f64) -> f64 {
        x.cos()
    }
    pub fn sin(x: f64) -> f64 {
        x.sin()
    }
    pub fn atan2(y: f64, x: f64) -> f64 {
        y.atan2(x)
    }
    pub fn hypot(x: f64, y: f64) -> f64 {
        x.hypot(y)
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        x.powf(y)
    }
    pub fn cosh(x: f64) -> f64 {
        x.cosh()
    }
    pub fn tanh(x: f64) -> f64 {
        x.tanh()
    }
    pub fn round(x: f64) -> f64 {
        x.round()
    }
    pub fn ceil(x: f64) -> f64 {
        x.ceil()
    }
}

#[cfg(not(feature = "std"))]
mod scalar {
    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }
    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }
    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }
    pub fn cos(x: f64) -> f64 {
        libm::cos(x)
    }
    pub fn sin(x: f64) -> f64 {
        libm::sin(x)
    }
    pub fn atan2(y: f64, x: f64) -> f64 {
        libm::atan2(y, x)
    }
    pub fn hypot(x: f64, y: f64) -> f64 {
        libm::hypot(x, y)
    }
    pub fn powf(x: f64, y: f64) -> f64 {
        libm::pow(x, y)
    }
    pub fn cosh(x: f64) -> f64 {
        libm::cosh(x)
    }
    pub fn tanh(x: f64) -> f64 {
        libm::tanh(x)
    }
    pub fn round(x: f64) -> f64 {
        libm::round(x)
    }
    pub fn ceil(x: f64) -> f64 {
        libm::ceil(x)
    }
}

/// Integer power by repeated multiplication.
pub fn powi(x: f64, n: i32) -> f64 {
    let mut acc = 1.0;
    let mut base = if n >= 0 { x } else { 1.0 / x };
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc *= base;
        }
        base *= base;
        k >>= 1;
    }
    acc
}

pub use scalar::*;

use num_complex::Complex64;

/// e^{i theta}
pub fn cis(theta: f64) -> Complex64 {
    Complex64::new(cos(theta), sin(theta))
}

/// Principal complex square root.
pub fn csqrt(z: Complex64) -> Complex64 {
    let r = hypot(z.re, z.im);
    if r == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let re = sqrt((r + z.re) / 2.0);
    let im_mag = sqrt((r - z.re) / 2.0);
    let im = if z.im >= 0.0 { im_mag } else { -im_mag };
    Complex64::new(re, im)
}

/// xoshiro256** seeded through splitmix64.
///
/// Integer-only state transitions keep streams bit-identical across
/// platforms, which the reproducibility contract of the report formats
/// relies on.
#[derive(Debug, Clone)]
pub struct Rng {
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut st = seed;
        let s = [
            splitmix64(&mut st),
            splitmix64(&mut st),
            splitmix64(&mut st),
            splitmix64(&mut st),
        ];
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1]
            .wrapping_mul(5)
            .rotate_left(7)
            .wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        let mut u1 = self.uniform();
        if u1 <= 0.0 {
            u1 = f64::MIN_POSITIVE;
        }
        let u2 = self.uniform();
        sqrt(-2.0 * ln(u1)) * cos(2.0 * core::f64::consts::PI * u2)
    }

    /// Uniform point in the ball of given radius in `dim` dimensions.
    pub fn ball_point(&mut self, dim: usize, radius: f64) -> Vec<f64> {
        let mut g: Vec<f64> = (0..dim).map(|_| self.normal()).collect();
        let norm = sqrt(g.iter().map(|x| x * x).sum::<f64>());
        if norm == 0.0 {
            return g;
        }
        let r = radius * powf(self.uniform(), 1.0 / dim as f64);
        for x in g.iter_mut() {
            *x *= r / norm;
        }
        g
    }
}
