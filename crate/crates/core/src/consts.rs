//! Shared real constants. Every main term is built from the same `sqrt 3`.

/// `sqrt(3)`, correctly rounded.
pub const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// `1 / (2 sqrt 3)`: the coefficient of `n^{3/2}` in the mean of `a_n`, and
/// the residue of `F(s)` at `s = 5/2`.
pub const INV_TWO_SQRT_3: f64 = 0.288_675_134_594_812_9;

/// Relative tolerance for comparing reals derived from exact integers.
pub const REAL_REL_TOL: f64 = 1e-12;
