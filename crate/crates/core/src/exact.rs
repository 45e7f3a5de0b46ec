//! Exact generation of the pyramidal numbers `P_n`, their distance `a_n` to
//! the nearest square, the divisor sums `b_n = (a * 1)(n)` and fixed-point
//! fractional parts of `sqrt(P_n)`.
//!
//! Indices below [`FAST_LIMIT`] run on `u128` arithmetic (`P_n < 2^126`);
//! anything larger falls back to `BigUint`. Both paths are exact.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::consts::INV_TWO_SQRT_3;
use crate::error::{Error, Result};
use crate::parallel;

/// Indices `n < 2^42` keep `P_n` below `2^126` and `a_n` below `2^64`.
pub const FAST_LIMIT: u64 = 1 << 42;

/// Default precision for fractional parts of `sqrt(P_n)`.
pub const DEFAULT_SCALE_BITS: u32 = 96;
pub const MIN_SCALE_BITS: u32 = 16;
pub const MAX_SCALE_BITS: u32 = 256;

/// Default memory budget for sieves and tables: 2 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 2 << 30;

/// `n(n+1)(2n+1)/6`, the sum of the first `n` squares.
pub fn pyramidal(n: u64) -> BigUint {
    if n < FAST_LIMIT {
        return BigUint::from(pyramidal_u128(n));
    }
    let (mut x, mut y, mut z) = (BigUint::from(n), BigUint::from(n) + 1u32, BigUint::from(n) * 2u32 + 1u32);
    // one of n, n+1 is even; one of n, n+1, 2n+1 is divisible by 3
    if (&x % 2u32).is_zero() {
        x /= 2u32;
    } else {
        y /= 2u32;
    }
    if (&x % 3u32).is_zero() {
        x /= 3u32;
    } else if (&y % 3u32).is_zero() {
        y /= 3u32;
    } else {
        z /= 3u32;
    }
    x * y * z
}

/// `P_n` on the 128-bit path. Panics if `n >= FAST_LIMIT`.
pub fn pyramidal_u128(n: u64) -> u128 {
    assert!(n < FAST_LIMIT, "pyramidal_u128 called with n = {n} >= 2^42");
    let (mut x, mut y, mut z) = (n as u128, n as u128 + 1, 2 * n as u128 + 1);
    if x % 2 == 0 {
        x /= 2;
    } else {
        y /= 2;
    }
    if x % 3 == 0 {
        x /= 3;
    } else if y % 3 == 0 {
        y /= 3;
    } else {
        z /= 3;
    }
    x * y * z
}

/// Floor square root.
pub fn isqrt(n: &BigUint) -> BigUint {
    n.sqrt()
}

pub fn isqrt_u128(n: u128) -> u128 {
    n.isqrt()
}

/// Distance from an integer to its nearest square, with the root of that square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NearestSquare {
    pub distance: BigUint,
    pub root: BigUint,
}

/// With `r = isqrt(N)`, picks the closer of `r^2` and `(r+1)^2`. The two
/// distances never tie: their midpoint `r^2 + r + 1/2` is not an integer.
pub fn nearest_square_distance(n: &BigUint) -> NearestSquare {
    let r = isqrt(n);
    let below = n - &r * &r;
    let r1 = &r + 1u32;
    let above = &r1 * &r1 - n;
    assert_ne!(below, above, "tie between adjacent squares");
    if below < above {
        NearestSquare { distance: below, root: r }
    } else {
        NearestSquare { distance: above, root: r1 }
    }
}

/// `(distance, root)` on the 128-bit path; valid for `n < 2^126`.
pub fn nearest_square_u128(n: u128) -> (u128, u128) {
    let r = n.isqrt();
    let below = n - r * r;
    let above = (r + 1) * (r + 1) - n;
    assert_ne!(below, above, "tie between adjacent squares");
    if below < above {
        (below, r)
    } else {
        (above, r + 1)
    }
}

/// `a_n = |P_n - y_n^2|`.
pub fn a(n: u64) -> BigUint {
    if n < FAST_LIMIT {
        BigUint::from(a_fast(n))
    } else {
        nearest_square_distance(&pyramidal(n)).distance
    }
}

/// `a_n` for `n < 2^42`, where it always fits in 64 bits.
pub fn a_u64(n: u64) -> Option<u64> {
    (n < FAST_LIMIT).then(|| a_fast(n))
}

#[inline]
fn a_fast(n: u64) -> u64 {
    let (d, _) = nearest_square_u128(pyramidal_u128(n));
    d as u64
}

/// One term of the sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceRecord {
    pub n: u64,
    pub p: BigUint,
    pub root: BigUint,
    pub a: BigUint,
}

impl SequenceRecord {
    pub fn compute(n: u64) -> Self {
        let p = pyramidal(n);
        let root = isqrt(&p);
        let a = nearest_square_distance(&p).distance;
        Self { n, p, root, a }
    }

    fn from_parts(n: u64, p: BigUint, root: BigUint) -> Self {
        let below = &p - &root * &root;
        let r1 = &root + 1u32;
        let above = &r1 * &r1 - &p;
        assert_ne!(below, above, "tie between adjacent squares");
        let a = below.min(above);
        Self { n, p, root, a }
    }
}

/// A way of producing consecutive sequence records.
pub trait SequenceGenerator: Send + Sync {
    fn name(&self) -> &'static str;

    /// Records for `lo..=hi` in increasing `n`.
    fn generate(&self, lo: u64, hi: u64) -> Box<dyn Iterator<Item = SequenceRecord> + Send>;
}

/// Every record from the closed form and an exact square root.
pub struct ClosedForm;

/// `P_{n+1} = P_n + (n+1)^2`, with the floor root advanced in place.
pub struct Incremental;

impl SequenceGenerator for ClosedForm {
    fn name(&self) -> &'static str {
        "closed-form"
    }

    fn generate(&self, lo: u64, hi: u64) -> Box<dyn Iterator<Item = SequenceRecord> + Send> {
        Box::new((lo..=hi).map(SequenceRecord::compute))
    }
}

impl SequenceGenerator for Incremental {
    fn name(&self) -> &'static str {
        "incremental"
    }

    fn generate(&self, lo: u64, hi: u64) -> Box<dyn Iterator<Item = SequenceRecord> + Send> {
        let mut state: Option<(BigUint, BigUint)> = None;
        Box::new((lo..=hi).map(move |n| {
            let (p, root) = match state.take() {
                None => {
                    let p = pyramidal(n);
                    let r = isqrt(&p);
                    (p, r)
                }
                Some((mut p, mut r)) => {
                    let step = BigUint::from(n);
                    p += &step * &step;
                    loop {
                        let next = &r + 1u32;
                        if &next * &next > p {
                            break;
                        }
                        r = next;
                    }
                    (p, r)
                }
            };
            state = Some((p.clone(), root.clone()));
            SequenceRecord::from_parts(n, p, root)
        }))
    }
}

/// Registered generation strategies, in registration order.
pub fn generators() -> Vec<Box<dyn SequenceGenerator>> {
    vec![Box::new(Incremental), Box::new(ClosedForm)]
}

pub fn generator(name: &str) -> Result<Box<dyn SequenceGenerator>> {
    generators()
        .into_iter()
        .find(|g| g.name() == name)
        .ok_or_else(|| Error::Unknown {
            kind: "sequence generator",
            name: name.to_string(),
        })
}

/// Records for `lo..=hi` using the incremental generator.
pub fn sequence_range(lo: u64, hi: u64) -> Result<Box<dyn Iterator<Item = SequenceRecord> + Send>> {
    if lo > hi {
        return Err(Error::param(format!("empty index range [{lo}, {hi}]")));
    }
    Ok(Incremental.generate(lo, hi))
}

/// `n^{3/2}` from the exact floor square root of `n^3 * 2^{2k}`, with `k`
/// chosen so the root carries at least 63 significant bits.
pub fn three_halves_power(n: u64) -> f64 {
    if n < (1 << 21) {
        let cube = (n as u128).pow(3);
        let half_shift = (127 - (128 - cube.leading_zeros())) / 2;
        let root = (cube << (2 * half_shift)).isqrt();
        root as f64 * 2f64.powi(-(half_shift as i32))
    } else {
        let cube = BigUint::from(n).pow(3u32) << 128u32;
        cube.sqrt().to_f64().unwrap_or(f64::INFINITY) * 2f64.powi(-64)
    }
}

/// `c_n = a_n - n^{3/2} / (2 sqrt 3)`.
pub fn residual_c(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("residual c_n is defined for n >= 1"));
    }
    let a = a(n).to_f64().unwrap_or(f64::INFINITY);
    Ok(residual_from(n, a))
}

#[inline]
pub(crate) fn residual_from(n: u64, a: f64) -> f64 {
    a - three_halves_power(n) * INV_TWO_SQRT_3
}

/// A byte budget for tables that grow with `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget(pub u64);

impl Default for MemoryBudget {
    fn default() -> Self {
        MemoryBudget(DEFAULT_MEMORY_BUDGET)
    }
}

impl MemoryBudget {
    pub fn check(&self, what: &str, needed: u64) -> Result<()> {
        if needed > self.0 {
            Err(Error::Resource {
                what: what.to_string(),
                needed,
                limit: self.0,
            })
        } else {
            Ok(())
        }
    }
}

/// `a_0, ..., a_x` as 64-bit integers (index = n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ATable(Vec<u64>);

impl ATable {
    pub fn build(x: u64, budget: MemoryBudget) -> Result<Self> {
        if x >= FAST_LIMIT {
            return Err(Error::param(format!("table limit x = {x} must stay below 2^42")));
        }
        budget.check("a_n table", 8 * (x + 1))?;
        let chunks = parallel::map_chunks(0, x, |lo, hi| (lo..=hi).map(a_fast).collect::<Vec<_>>());
        let mut values = Vec::with_capacity(x as usize + 1);
        for c in chunks {
            values.extend(c);
        }
        Ok(ATable(values))
    }

    /// Wraps values already known to be `a_0, ..., a_x`.
    pub(crate) fn from_values(values: Vec<u64>) -> Self {
        debug_assert!(!values.is_empty());
        ATable(values)
    }

    /// Largest index stored.
    pub fn limit(&self) -> u64 {
        self.0.len() as u64 - 1
    }

    pub fn get(&self, n: u64) -> u64 {
        self.0[n as usize]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.0
    }
}

/// `b_n = sum_{d | n} a_d` for `1 <= n <= x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSums(Vec<u64>);

impl DivisorSums {
    pub fn limit(&self) -> u64 {
        self.0.len() as u64
    }

    /// `b_n`, `1 <= n <= limit`.
    pub fn get(&self, n: u64) -> u64 {
        self.0[n as usize - 1]
    }

    /// `b_1, ..., b_x` in order.
    pub fn values(&self) -> &[u64] {
        &self.0
    }
}

/// Divisor-sum sieve: every `a_d` is added to each multiple of `d`.
///
/// `b_n` stays below `3 n^{3/2}`, so 64-bit entries cannot overflow for any
/// `x` that fits the budget; the additions are checked regardless.
pub fn b_sieve(x: u64, budget: MemoryBudget) -> Result<DivisorSums> {
    if x == 0 {
        return Err(Error::param("b_sieve needs x >= 1"));
    }
    budget.check("divisor-sum sieve", 16 * (x + 1))?;
    let table = ATable::build(x, budget)?;
    b_sieve_from(&table, x)
}

/// Same sieve reusing an existing `a_n` table (`table.limit() >= x`).
pub fn b_sieve_from(table: &ATable, x: u64) -> Result<DivisorSums> {
    if x == 0 || x > table.limit() {
        return Err(Error::param(format!("b_sieve limit {x} outside table range")));
    }
    let len = x as usize;
    let mut b = vec![0u64; len];
    for d in 1..=len {
        let ad = table.0[d];
        if ad == 0 {
            continue;
        }
        let mut m = d;
        while m <= len {
            b[m - 1] = b[m - 1]
                .checked_add(ad)
                .ok_or_else(|| Error::param(format!("b_{m} overflows 64 bits")))?;
            m += d;
        }
    }
    Ok(DivisorSums(b))
}

/// `value / 2^scale_bits`, an under-approximation of a number in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPointFraction {
    pub value: BigUint,
    pub scale_bits: u32,
    pub error_bound: f64,
}

impl FixedPointFraction {
    pub fn to_f64(&self) -> f64 {
        let v = self.to_fixed_u64();
        (v >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// The top 64 fractional bits, i.e. `floor(value * 2^64 / 2^B)`.
    pub fn to_fixed_u64(&self) -> u64 {
        let shifted = if self.scale_bits >= 64 {
            &self.value >> (self.scale_bits - 64)
        } else {
            &self.value << (64 - self.scale_bits)
        };
        shifted.to_u64().expect("fraction below one")
    }
}

/// `{sqrt(P_n)}` to `scale_bits` bits via `isqrt(P_n * 2^{2B}) - floor(sqrt P_n) * 2^B`.
pub fn frac_sqrt_pyramidal(n: u64, scale_bits: u32) -> Result<FixedPointFraction> {
    if n == 0 {
        return Err(Error::param("fractional parts are taken for n >= 1"));
    }
    if !(MIN_SCALE_BITS..=MAX_SCALE_BITS).contains(&scale_bits) {
        return Err(Error::param(format!(
            "scale_bits = {scale_bits} outside [{MIN_SCALE_BITS}, {MAX_SCALE_BITS}]"
        )));
    }
    let p = pyramidal(n);
    let root = isqrt(&p);
    let scaled = isqrt(&(p << (2 * scale_bits)));
    let value = scaled - (root << scale_bits);
    debug_assert!(value < BigUint::one() << scale_bits);
    Ok(FixedPointFraction {
        value,
        scale_bits,
        error_bound: 2f64.powi(-(scale_bits as i32)),
    })
}
