//! Exact and asymptotic counting of labelled surjections.
//!
//! `surjections(a, b)` is the number of ways to map `[a]` onto `[b]`
//! hitting every target, i.e. `b!` times the Stirling partition number.
//! The exact values follow the recurrence
//! `T(a, b) = b (T(a-1, b) + T(a-1, b-1))`, and the asymptotic form is a
//! saddle-point formula parameterized by the root of `r / (1 - e^-r) = a/b`.
//! Counts overflow machine words almost immediately, so exact values are
//! big integers and the approximation works in log space.

use num_bigint::BigUint;

use crate::{Error, Result};

/// Largest `a` any exact computation accepts. The eager oracle stores a
/// triangle of big integers, so keep instance bounds well below this when
/// memory matters.
pub const EXACT_LIMIT: usize = 2000;

/// Precomputed triangle of exact surjection counts up to a fixed `a_max`.
#[derive(Debug, Clone)]
pub struct StirlingOracle {
    a_max: usize,
    /// `rows[a][b]` = surjections from `[a]` onto `[b]`, `b <= a`.
    rows: Vec<Vec<BigUint>>,
}

impl StirlingOracle {
    pub fn new(a_max: usize) -> Result<Self> {
        if a_max > EXACT_LIMIT {
            return Err(Error::Config(format!(
                "a_max {a_max} exceeds the supported exact bound {EXACT_LIMIT}"
            )));
        }
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(a_max + 1);
        rows.push(vec![BigUint::from(1u32)]);
        for a in 1..=a_max {
            let prev = &rows[a - 1];
            let mut row = Vec::with_capacity(a + 1);
            row.push(BigUint::from(0u32));
            for b in 1..=a {
                let same = if b < prev.len() {
                    prev[b].clone()
                } else {
                    BigUint::from(0u32)
                };
                row.push(BigUint::from(b as u64) * (same + &prev[b - 1]));
            }
            rows.push(row);
        }
        Ok(StirlingOracle { a_max, rows })
    }

    pub fn a_max(&self) -> usize {
        self.a_max
    }

    /// Exact surjection count from `[a]` onto `[b]`; zero when `b > a`.
    pub fn surjections(&self, a: usize, b: usize) -> Result<BigUint> {
        if a > self.a_max {
            return Err(Error::StirlingOutOfBounds {
                a,
                b,
                a_max: self.a_max,
            });
        }
        if b > a {
            return Ok(BigUint::from(0u32));
        }
        Ok(self.rows[a][b].clone())
    }
}

/// Exact surjection count without an oracle, one rolling row of the
/// recurrence in `O(a b)` big-integer operations.
pub fn stirling_exact(a: usize, b: usize) -> Result<BigUint> {
    if a > EXACT_LIMIT {
        return Err(Error::StirlingOutOfBounds {
            a,
            b,
            a_max: EXACT_LIMIT,
        });
    }
    if b > a {
        return Ok(BigUint::from(0u32));
    }
    // row[j] = surjections from the first `step` elements onto [j].
    let mut row = vec![BigUint::from(0u32); b + 1];
    row[0] = BigUint::from(1u32);
    for step in 1..=a {
        // Right-to-left keeps the previous step's values intact where the
        // recurrence still needs them; row[0] becomes 0 after step 1.
        for j in (1..=b.min(step)).rev() {
            let sum = &row[j] + &row[j - 1];
            row[j] = BigUint::from(j as u64) * sum;
        }
        row[0] = BigUint::from(0u32);
    }
    Ok(std::mem::take(&mut row[b]))
}

/// Natural log of a big integer in double precision; negative infinity
/// for zero.
pub fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        let v = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let top = (x >> shift).iter_u64_digits().next().unwrap_or(0);
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Saddle-point approximation of a surjection count, carried in log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoserWyman {
    pub a: u64,
    pub b: u64,
    /// Root of `r / (1 - e^-r) = a/b`.
    pub r: f64,
    /// Curvature factor `pi r e^r (e^r - 1 - r) / (2 (e^r - 1)^2)`.
    pub h: f64,
    /// `ln` of the approximate count
    /// `a! (e^r - 1)^b / (2 r^a sqrt(h b))`.
    pub ln_value: f64,
    /// The count itself when it fits a finite double.
    pub value: Option<f64>,
}

/// Approximates `surjections(a, b)` for `a/b > 1`. The ratio must clear 1
/// by at least `1e-6`; the root search is bisection to relative width
/// `1e-12`.
pub fn stirling_moser_wyman(a: u64, b: u64) -> Result<MoserWyman> {
    if b == 0 {
        return Err(Error::Config("surjection target count must be positive".to_string()));
    }
    let g = a as f64 / b as f64;
    if g <= 1.0 + 1e-6 {
        return Err(Error::DegenerateRatio(g));
    }

    // r / (1 - e^-r) increases from 1 at r = 0, and at r = g it exceeds g,
    // so [tiny, g] brackets the root.
    let f = |r: f64| r / (-(-r).exp_m1());
    let mut lo = 1e-12f64;
    let mut hi = g;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < g {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * lo {
            break;
        }
    }
    let r = 0.5 * (lo + hi);
    if ((f(r) - g) / g).abs() > 1e-9 {
        return Err(Error::Config(format!(
            "surjection root search failed to converge at a/b = {g}"
        )));
    }

    let er1 = r.exp_m1();
    let h = std::f64::consts::PI * r * (er1 + 1.0) * (er1 - r) / (2.0 * er1 * er1);
    let mut ln_factorial = 0.0f64;
    for k in 2..=a {
        ln_factorial += (k as f64).ln();
    }
    let ln_value = ln_factorial + b as f64 * er1.ln()
        - std::f64::consts::LN_2
        - a as f64 * r.ln()
        - 0.5 * (h * b as f64).ln();
    let value = (ln_value.abs() < 709.0).then(|| ln_value.exp());
    Ok(MoserWyman {
        a,
        b,
        r,
        h,
        ln_value,
        value,
    })
}
