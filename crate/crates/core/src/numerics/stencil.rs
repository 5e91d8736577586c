use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::{One, ToPrimitive, Zero};

use crate::diffalg::Coeff;

/// Default accuracy order of the central stencils.
pub const DEFAULT_ACCURACY: u32 = 20;

/// A centered finite-difference stencil for `d^order/dx^order`, weights in units of `h^-order`.
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    pub order: u32,
    pub accuracy: u32,
    pub radius: usize,
    pub weights: Vec<f64>,
}

impl Stencil {
    /// The narrowest central stencil of at least the given (even) accuracy order.
    /// Weights come from the exact rational moment system `Σ_k w_k k^m / m! = δ_{m,order}`.
    pub fn central(order: u32, accuracy: u32) -> Self {
        assert!(accuracy >= 2 && accuracy % 2 == 0, "accuracy must be even and >= 2");
        let radius = ((order.max(1) - 1) / 2 + accuracy / 2) as usize;
        let weights = cached_weights(order, radius);
        Stencil { order, accuracy, radius, weights }
    }

    pub fn width(&self) -> usize {
        2 * self.radius + 1
    }

    /// Applies the stencil at `center` of `f`, spacing `h`.
    ///
    /// Symmetric pairs are combined first (`f(c+k) - f(c-k)` for odd orders,
    /// `f(c+k) + f(c-k) - 2f(c)` for even ones), so constants map to exactly zero.
    pub fn apply(&self, f: impl Fn(usize) -> f64, center: usize, h: f64) -> f64 {
        let r = self.radius;
        let odd = self.order % 2 == 1;
        let fc = f(center);
        let mut acc = 0.0;
        for k in 1..=r {
            let w = self.weights[r + k];
            let (p, m) = (f(center + k), f(center - k));
            acc += if odd { w * (p - m) } else { w * ((p - fc) + (m - fc)) };
        }
        if self.order == 0 {
            acc += fc;
        }
        acc / h.powi(self.order as i32)
    }
}

/// The exact solve is costly for wide stencils and the same few are requested over and over.
fn cached_weights(order: u32, radius: usize) -> Vec<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, usize), Vec<f64>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(w) = cache.lock().expect("stencil cache poisoned").get(&(order, radius)) {
        return w.clone();
    }
    let w = central_weights(order, radius);
    cache.lock().expect("stencil cache poisoned").entry((order, radius)).or_insert(w).clone()
}

fn central_weights(order: u32, radius: usize) -> Vec<f64> {
    let size = 2 * radius + 1;
    let offsets: Vec<i64> = (-(radius as i64)..=radius as i64).collect();
    // rows m = 0..size: Σ_k w_k o_k^m / m! = δ_{m,order}
    let mut a: Vec<Vec<Coeff>> = Vec::with_capacity(size);
    let mut fact = Coeff::one();
    for m in 0..size {
        if m > 0 {
            fact *= Coeff::from_integer((m as i64).into());
        }
        let mut row: Vec<Coeff> = offsets
            .iter()
            .map(|o| Coeff::from_integer(num_bigint::BigInt::from(*o).pow(m as u32)) / &fact)
            .collect();
        row.push(if m == order as usize { Coeff::one() } else { Coeff::zero() });
        a.push(row);
    }
    for col in 0..size {
        let pivot = (col..size).find(|&r| !a[r][col].is_zero()).expect("Vandermonde system is regular");
        a.swap(col, pivot);
        let inv = Coeff::one() / &a[col][col];
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..size {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=size {
                    let v = &a[col][c] * &f;
                    a[r][c] -= v;
                }
            }
        }
    }
    a.iter().map(|row| row[size].to_f64().expect("finite weight")).collect()
}
