//! Iterative radix-2 decimation-in-time FFT.

use std::f64::consts::PI;

/// Minimal complex number; the transform needs nothing richer.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }

    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// Planned transform for one power-of-two length.
#[derive(Debug, Clone)]
pub struct Radix2Fft {
    len: usize,
    twiddles: Vec<Complex>,
}

impl Radix2Fft {
    /// Panics unless `len` is a non-zero power of two.
    pub fn new(len: usize) -> Self {
        assert!(len.is_power_of_two(), "FFT length {len} is not a power of two");
        // each twiddle computed directly, no recurrence drift
        let twiddles = (0..len / 2)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex::new(angle.cos(), angle.sin())
            })
            .collect();
        Self { len, twiddles }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Forward transform in place, `X_k = sum_n x_n e^{-2 pi i k n / N}`.
    pub fn process(&self, buf: &mut [Complex]) {
        assert_eq!(buf.len(), self.len);
        let n = self.len;
        if n <= 1 {
            return;
        }

        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }

        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = buf[start + k];
                    let b = buf[start + k + half].mul(w);
                    buf[start + k] = Complex::new(a.re + b.re, a.im + b.im);
                    buf[start + k + half] = Complex::new(a.re - b.re, a.im - b.im);
                }
            }
            half *= 2;
        }
    }

    /// Transform of a real signal, zero-padded (or truncated) to the plan length.
    pub fn process_real<T: Copy + Into<f64>>(&self, input: &[T]) -> Vec<Complex> {
        let mut buf = vec![Complex::default(); self.len];
        for (slot, &x) in buf.iter_mut().zip(input) {
            slot.re = x.into();
        }
        self.process(&mut buf);
        buf
    }
}
