//! Exact rank over the Gaussian rationals, independent of floating-point
//! linear algebra.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::numkit::Matrix;

/// Largest power-of-two denominator accepted as "exactly representable".
pub const MAX_FRACTION_BITS: i32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Gaussian {
    re: BigInt,
    im: BigInt,
}

impl Gaussian {
    fn zero() -> Self {
        Gaussian { re: BigInt::zero(), im: BigInt::zero() }
    }

    fn one() -> Self {
        Gaussian { re: BigInt::one(), im: BigInt::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn sub(&self, o: &Gaussian) -> Gaussian {
        Gaussian { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    /// Exact quotient; the elimination guarantees divisibility.
    fn div_exact(&self, o: &Gaussian) -> Gaussian {
        let norm = &o.re * &o.re + &o.im * &o.im;
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        debug_assert!((&re % &norm).is_zero() && (&im % &norm).is_zero());
        Gaussian { re: re / &norm, im: im / norm }
    }
}

/// Number of fractional bits needed to write `x` exactly, or `None` if more
/// than [`MAX_FRACTION_BITS`] are needed.
fn fraction_bits(x: f64) -> Option<i32> {
    if x == 0.0 {
        return Some(0);
    }
    for bits in 0..=MAX_FRACTION_BITS {
        let scaled = x * f64::powi(2.0, bits);
        if scaled.fract() == 0.0 && scaled.abs() < 2f64.powi(53) {
            return Some(bits);
        }
    }
    None
}

fn to_bigint(x: f64) -> BigInt {
    // `x` is an integer-valued f64 below 2^53 here
    BigInt::from(x as i64)
}

/// Rank of a complex matrix whose entries are dyadic rationals with at most
/// [`MAX_FRACTION_BITS`] fractional bits, by fraction-free (Bareiss)
/// elimination over the Gaussian integers.
pub fn exact_rank(m: &Matrix) -> Result<usize> {
    let mut bits = 0;
    for (idx, z) in m.iter().enumerate() {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NotExact(format!("entry {idx} is not finite")));
        }
        for part in [z.re, z.im] {
            match fraction_bits(part) {
                Some(b) => bits = bits.max(b),
                None => return Err(Error::NotExact(format!("entry {idx} = {z} has no short dyadic form"))),
            }
        }
    }
    let scale = f64::powi(2.0, bits);
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<Gaussian>> = (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let z = m[(i, j)];
                    Gaussian { re: to_bigint(z.re * scale), im: to_bigint(z.im * scale) }
                })
                .collect()
        })
        .collect();
    let mut rank = 0;
    let mut prev = Gaussian::one();
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(pivot) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        for r in rank + 1..rows {
            for c in col + 1..cols {
                let t = a[rank][col].mul(&a[r][c]).sub(&a[r][col].mul(&a[rank][c]));
                a[r][c] = t.div_exact(&prev);
            }
            a[r][col] = Gaussian::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    Ok(rank)
}

/// Round every entry to the nearest multiple of `2^-bits`, failing if any
/// entry moves by more than `slack`. Removes floating-point noise from data
/// that is exact by construction.
pub fn snap_dyadic(m: &Matrix, bits: i32, slack: f64) -> Result<Matrix> {
    let scale = f64::powi(2.0, bits);
    let mut out = m.clone();
    for (idx, z) in out.iter_mut().enumerate() {
        let re = (z.re * scale).round() / scale;
        let im = (z.im * scale).round() / scale;
        let moved = (z.re - re).abs().max((z.im - im).abs());
        if !(moved <= slack) {
            return Err(Error::NotExact(format!("entry {idx} is {moved:.3e} away from a multiple of 2^-{bits}")));
        }
        z.re = re;
        z.im = im;
    }
    Ok(out)
}
