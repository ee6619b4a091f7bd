//! Bessel functions of the first kind for integer order.

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j`].
pub const MAX_BESSEL_ORDER: u32 = 200;
/// Largest `|x|` accepted by [`bessel_j`].
pub const MAX_BESSEL_ARGUMENT: f64 = 50.0;

// Above this the alternating series loses too many digits to cancellation.
const SERIES_LIMIT: f64 = 10.0;

/// Non-negative integer Bessel order, bounded by [`MAX_BESSEL_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BesselOrder(u32);

impl BesselOrder {
    pub fn new(n: u32) -> Result<Self> {
        if n > MAX_BESSEL_ORDER {
            return Err(Error::OrderTooLarge(n));
        }
        Ok(Self(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl TryFrom<u32> for BesselOrder {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Self::new(n)
    }
}

/// `J_n(x)`.
///
/// Uses the power series `sum_k (-1)^k (x/2)^(n+2k) / (k! (n+k)!)` for `|x| <= 10`
/// and Miller's backward recurrence beyond that. Negative arguments go through
/// `J_n(-x) = (-1)^n J_n(x)`, so parity holds bit for bit.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x.abs() <= MAX_BESSEL_ARGUMENT) {
        return Err(Error::ArgumentOutOfRange(x));
    }
    let n = order.get();
    let ax = x.abs();
    let value = if ax <= SERIES_LIMIT {
        series(n, ax)
    } else {
        backward_recurrence(n, ax)
    };
    Ok(if x < 0.0 && n % 2 == 1 { -value } else { value })
}

/// `J_n(x)` for any integer order via `J_{-n} = (-1)^n J_n`.
pub fn bessel_j_signed(n: i64, x: f64) -> Result<f64> {
    let order = u32::try_from(n.unsigned_abs()).map_err(|_| Error::OrderTooLarge(u32::MAX))?;
    let value = bessel_j(BesselOrder::new(order)?, x)?;
    Ok(if n < 0 && order % 2 == 1 {
        -value
    } else {
        value
    })
}

/// `[J_0(x), ..., J_{n_max}(x)]`.
pub fn bessel_j_table(n_max: u32, x: f64) -> Result<Vec<f64>> {
    (0..=n_max)
        .map(|n| bessel_j(BesselOrder::new(n)?, x))
        .collect()
}

fn series(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    // (x/2)^n / n! built incrementally so neither factor overflows.
    let mut term = 1.0;
    for i in 1..=n {
        term *= half / f64::from(i);
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (f64::from(n) + k));
        sum += term;
        // `<=` so a sum near the subnormal range, where the bound underflows to 0, still stops
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

fn backward_recurrence(n: u32, x: f64) -> f64 {
    let top = f64::from(n).max(x);
    let mut m = (top + 30.0 + 6.0 * top.sqrt()) as u32;
    m += m % 2;

    let two_over_x = 2.0 / x;
    let (mut next, mut cur) = (0.0f64, 1e-300f64);
    let mut wanted = 0.0;
    let mut norm = 0.0;
    for k in (1..=m).rev() {
        // cur = J_k (unnormalized); produce J_{k-1}
        let prev = f64::from(k) * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if k - 1 == n {
            wanted = cur;
        }
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            wanted *= 1e-250;
            norm *= 1e-250;
        }
    }
    norm += cur;
    wanted / norm
}
