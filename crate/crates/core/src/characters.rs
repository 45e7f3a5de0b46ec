//! Dirichlet characters modulo `q` and the twisted sums `sum a_n chi(n)`.
//!
//! A character is stored by the exact rational angles it assigns to a fixed
//! set of generators of `(Z/qZ)^*`; complex values appear only when a
//! character is evaluated.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use serde::Serialize;

use crate::ap::{self, ASource, OnTheFly};
use crate::error::{Error, Result};
use crate::parallel;

/// Prime factorization by trial division, primes ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut k = 0;
            while n.is_multiple_of(p) {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(q: u64) -> u64 {
    factorize(q)
        .into_iter()
        .map(|(p, k)| (p - 1) * p.pow(k - 1))
        .product()
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    let mut b = (base % m) as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let e = (a as i64).extended_gcd(&(m as i64));
    debug_assert_eq!(e.gcd, 1);
    e.x.rem_euclid(m as i64) as u64
}

/// Smallest positive primitive root modulo an odd prime power.
fn primitive_root(p: u64, k: u32) -> u64 {
    let m = p.pow(k);
    let phi = (p - 1) * p.pow(k - 1);
    let mut ell: Vec<u64> = factorize(p - 1).into_iter().map(|(l, _)| l).collect();
    if k > 1 {
        ell.push(p);
    }
    (2..m)
        .find(|&g| g % p != 0 && ell.iter().all(|&l| pow_mod(g, phi / l, m) != 1))
        .expect("odd prime powers have primitive roots")
}

/// Cyclic decomposition of `(Z/qZ)^*` with a discrete-log table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitGroupStructure {
    q: u64,
    /// `(generator mod q, order)`, in the order of the prime factors of `q`.
    generators: Vec<(u64, u64)>,
    /// Exponent vectors, `generators.len()` entries per residue.
    logs: Vec<u32>,
    is_unit: Vec<bool>,
}

impl UnitGroupStructure {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::param("modulus q must be at least 1"));
        }
        if q > 1 << 24 {
            return Err(Error::param(format!("modulus q = {q} too large for a character table")));
        }
        let mut generators = Vec::new();
        for (p, k) in factorize(q) {
            let m = p.pow(k);
            let rest = q / m;
            // lift g mod m to the residue that is 1 modulo the other factors
            let lift = |g: u64| -> u64 {
                if rest == 1 {
                    return g % q;
                }
                let t = ((g + m - 1) % m) as u128 * inverse_mod(rest % m, m) as u128 % m as u128;
                ((1 + rest as u128 * t) % q as u128) as u64
            };
            match (p, k) {
                (2, 1) => {}
                (2, 2) => generators.push((lift(3), 2)),
                (2, _) => {
                    generators.push((lift(m - 1), 2));
                    generators.push((lift(5), m / 4));
                }
                _ => generators.push((lift(primitive_root(p, k)), (p - 1) * p.pow(k - 1))),
            }
        }

        let r = generators.len();
        let mut logs = vec![0u32; q as usize * r];
        let mut is_unit = vec![false; q as usize];
        let mut exps = vec![0u64; r];
        let phi: u64 = generators.iter().map(|g| g.1).product();
        for _ in 0..phi {
            let value = exps
                .iter()
                .zip(&generators)
                .fold(1 % q, |acc, (&e, &(g, _))| {
                    (acc as u128 * pow_mod(g, e, q) as u128 % q as u128) as u64
                });
            let slot = value as usize;
            assert!(!is_unit[slot], "generators do not present the unit group");
            is_unit[slot] = true;
            for (i, &e) in exps.iter().enumerate() {
                logs[slot * r + i] = e as u32;
            }
            // mixed-radix increment, last generator fastest
            for i in (0..r).rev() {
                exps[i] += 1;
                if exps[i] < generators[i].1 {
                    break;
                }
                exps[i] = 0;
            }
        }
        Ok(Self {
            q,
            generators,
            logs,
            is_unit,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn generators(&self) -> &[(u64, u64)] {
        &self.generators
    }

    /// `phi(q)`, the product of the generator orders.
    pub fn order(&self) -> u64 {
        self.generators.iter().map(|g| g.1).product()
    }

    /// Exponent vector of `n` modulo `q`, or `None` when `gcd(n, q) > 1`.
    pub fn discrete_log(&self, n: u64) -> Option<&[u32]> {
        let slot = (n % self.q) as usize;
        if !self.is_unit[slot] {
            return None;
        }
        let r = self.generators.len();
        Some(&self.logs[slot * r..slot * r + r])
    }

    /// `prod g_i^{e_i} mod q`.
    pub fn reconstruct(&self, exps: &[u32]) -> u64 {
        exps.iter().zip(&self.generators).fold(1 % self.q, |acc, (&e, &(g, _))| {
            (acc as u128 * pow_mod(g, e as u64, self.q) as u128 % self.q as u128) as u64
        })
    }
}

/// An exact angle `num / den` in `[0, 1)`, in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    pub num: u64,
    pub den: u64,
}

impl Angle {
    fn reduced(num: u64, den: u64) -> Self {
        let num = num % den;
        let g = num.gcd(&den);
        Self {
            num: num / g,
            den: den / g,
        }
    }

    /// `e(num/den)`, exact on quarter turns.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            (n, d) => Complex64::from_polar(1.0, std::f64::consts::TAU * n as f64 / d as f64),
        }
    }
}

/// A Dirichlet character modulo `q`.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    group: Arc<UnitGroupStructure>,
    index: usize,
    /// `chi(g_i) = e(numerators[i] / d_i)`.
    numerators: Vec<u64>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, other: &Self) -> bool {
        self.group.q == other.group.q && self.numerators == other.numerators
    }
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.group.q
    }

    /// Position in the enumeration returned by [`characters`].
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_principal(&self) -> bool {
        self.numerators.iter().all(|&k| k == 0)
    }

    pub fn group(&self) -> &UnitGroupStructure {
        &self.group
    }

    /// `(numerator, generator order)` per generator.
    pub fn angles_on_generators(&self) -> Vec<(u64, u64)> {
        self.numerators
            .iter()
            .zip(&self.group.generators)
            .map(|(&k, &(_, d))| (k, d))
            .collect()
    }

    /// Stable identifier `q:k1/d1,k2/d2,...`.
    pub fn id(&self) -> String {
        self.to_string()
    }

    /// `chi(n)` as an exact angle; `None` when `gcd(n, q) > 1`.
    pub fn angle(&self, n: u64) -> Option<Angle> {
        let exps = self.group.discrete_log(n)?;
        let den = self.group.generators.iter().fold(1u64, |l, &(_, d)| l.lcm(&d));
        let num = exps
            .iter()
            .zip(&self.numerators)
            .zip(&self.group.generators)
            .fold(0u128, |acc, ((&e, &k), &(_, d))| {
                (acc + e as u128 * k as u128 * (den / d) as u128) % den as u128
            });
        Some(Angle::reduced(num as u64, den))
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        self.angle(n).map_or(Complex64::new(0.0, 0.0), Angle::to_complex)
    }

    /// `chi(0), ..., chi(q - 1)`.
    pub fn value_table(&self) -> Vec<Complex64> {
        (0..self.group.q).map(|n| self.eval(n)).collect()
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.group.q)?;
        for (i, (k, d)) in self.angles_on_generators().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{k}/{d}")?;
        }
        Ok(())
    }
}

pub fn unit_group_structure(q: u64) -> Result<UnitGroupStructure> {
    UnitGroupStructure::new(q)
}

/// All `phi(q)` characters, lexicographic in the angle numerators; the
/// principal character comes first.
pub fn characters(q: u64) -> Result<Vec<DirichletCharacter>> {
    let group = Arc::new(UnitGroupStructure::new(q)?);
    let orders: Vec<u64> = group.generators.iter().map(|g| g.1).collect();
    let total = group.order() as usize;
    let mut out = Vec::with_capacity(total);
    let mut numerators = vec![0u64; orders.len()];
    for index in 0..total {
        out.push(DirichletCharacter {
            group: Arc::clone(&group),
            index,
            numerators: numerators.clone(),
        });
        for i in (0..orders.len()).rev() {
            numerators[i] += 1;
            if numerators[i] < orders[i] {
                break;
            }
            numerators[i] = 0;
        }
    }
    Ok(out)
}

/// Looks a character up by enumeration index or by its `q:k/d,...` id.
pub fn find_character(q: u64, key: &str) -> Result<DirichletCharacter> {
    let all = characters(q)?;
    if let Ok(i) = key.parse::<usize>() {
        return all.into_iter().nth(i).ok_or_else(|| Error::Unknown {
            kind: "character index",
            name: key.to_string(),
        });
    }
    all.into_iter()
        .find(|c| c.id() == key)
        .ok_or_else(|| Error::Unknown {
            kind: "character",
            name: key.to_string(),
        })
}

pub fn eval_char(chi: &DirichletCharacter, n: u64) -> Complex64 {
    chi.eval(n)
}

/// `sum_{b mod q} chi(b)` for every character mod `q`, in enumeration order.
pub fn character_residue_sum(q: u64) -> Result<Vec<Complex64>> {
    Ok(characters(q)?
        .iter()
        .map(|chi| parallel::pairwise_sum_complex(&chi.value_table()))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwistedSumReport {
    pub q: u64,
    pub char_index: usize,
    pub char_id: String,
    pub x: u64,
    pub re_s: f64,
    pub im_s: f64,
    /// `phi(q) x^{5/2} / (5 q sqrt 3)` for the principal character, else 0.
    pub main_term: f64,
    pub residual_abs: f64,
}

impl TwistedSumReport {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re_s, self.im_s)
    }
}

pub fn twisted_sum(chi: &DirichletCharacter, x: u64) -> Result<TwistedSumReport> {
    twisted_sum_with(&OnTheFly, chi, x)
}

pub fn twisted_sum_with(source: &dyn ASource, chi: &DirichletCharacter, x: u64) -> Result<TwistedSumReport> {
    let value = twisted_value(source, chi, x)?;
    let q = chi.modulus();
    let main_term = if chi.is_principal() {
        euler_phi(q) as f64 * ap::main_term_sum(x, q)
    } else {
        0.0
    };
    Ok(TwistedSumReport {
        q,
        char_index: chi.index(),
        char_id: chi.id(),
        x,
        re_s: value.re,
        im_s: value.im,
        main_term,
        residual_abs: (value - main_term).norm(),
    })
}

fn twisted_value(source: &dyn ASource, chi: &DirichletCharacter, x: u64) -> Result<Complex64> {
    if x == 0 {
        return Err(Error::param("cutoff x must be at least 1"));
    }
    let table = chi.value_table();
    let q = chi.modulus();
    Ok(parallel::sum_complex(1, x, |n| {
        table[(n % q) as usize] * source.a(n) as f64
    }))
}

/// Recovers the coprime progression sum `sum_{n <= x, n = b mod q} a_n` from
/// the twisted sums by character orthogonality.
pub fn ap_reconstruct(b: u64, q: u64, x: u64) -> Result<Complex64> {
    ap_reconstruct_with(&OnTheFly, b, q, x)
}

pub fn ap_reconstruct_with(source: &dyn ASource, b: u64, q: u64, x: u64) -> Result<Complex64> {
    if q == 0 {
        return Err(Error::param("modulus q must be at least 1"));
    }
    if b.gcd(&q) != 1 {
        return Err(Error::param(format!("gcd({b}, {q}) != 1")));
    }
    let chars = characters(q)?;
    let terms = chars
        .iter()
        .map(|chi| Ok(chi.eval(b).conj() * twisted_value(source, chi, x)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(parallel::pairwise_sum_complex(&terms) / chars.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ap::ApQuery;
    use crate::exact;
    use proptest::prelude::*;

    #[test]
    fn group_examples() {
        let g = unit_group_structure(1).unwrap();
        assert!(g.generators().is_empty());
        assert_eq!(g.order(), 1);
        let g = unit_group_structure(4).unwrap();
        assert_eq!(g.generators(), &[(3, 2)]);
        let g = unit_group_structure(8).unwrap();
        assert_eq!(g.generators(), &[(7, 2), (5, 2)]);
        assert!(unit_group_structure(0).is_err());
    }

    #[test]
    fn group_orders_and_logs() {
        for q in 1..=300 {
            let g = unit_group_structure(q).unwrap();
            assert_eq!(g.order(), euler_phi(q), "q = {q}");
            for n in 0..q {
                match g.discrete_log(n) {
                    Some(e) => {
                        assert_eq!(n.gcd(&q), 1);
                        assert_eq!(g.reconstruct(e), n % q);
                    }
                    None => assert!(n.gcd(&q) > 1 || q == 1),
                }
            }
        }
    }

    #[test]
    fn character_examples() {
        let c = characters(1).unwrap();
        assert_eq!(c.len(), 1);
        assert!(c[0].is_principal());

        let c = characters(4).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c[1].eval(3), Complex64::new(-1.0, 0.0));

        let c = characters(5).unwrap();
        assert_eq!(c.len(), 4);
        let chi2: Vec<_> = c.iter().map(|chi| chi.eval(2)).collect();
        assert!(chi2.contains(&Complex64::new(0.0, 1.0)));
        assert!(chi2.contains(&Complex64::new(0.0, -1.0)));
    }

    #[test]
    fn eval_examples() {
        let chi0 = &characters(6).unwrap()[0];
        assert_eq!(chi0.eval(4), Complex64::new(0.0, 0.0));
        for q in 1..=30 {
            for chi in characters(q).unwrap() {
                assert_eq!(chi.eval(1), Complex64::new(1.0, 0.0));
            }
        }
        let nonprincipal = &characters(4).unwrap()[1];
        assert_eq!(nonprincipal.eval(7), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn ids_are_stable() {
        let c = characters(8).unwrap();
        let ids: Vec<_> = c.iter().map(|x| x.id()).collect();
        assert_eq!(ids, ["8:0/2,0/2", "8:0/2,1/2", "8:1/2,0/2", "8:1/2,1/2"]);
        assert_eq!(find_character(8, "8:1/2,0/2").unwrap(), c[2]);
        assert_eq!(find_character(8, "3").unwrap(), c[3]);
        assert!(find_character(8, "9").is_err());
        assert_eq!(characters(2).unwrap()[0].id(), "2:");
    }

    #[test]
    fn residue_sum_examples() {
        assert_eq!(character_residue_sum(1).unwrap(), vec![Complex64::new(1.0, 0.0)]);
        let s = character_residue_sum(4).unwrap();
        assert_eq!(s[0], Complex64::new(2.0, 0.0));
        assert!(s[1].norm() < 1e-10);
    }

    fn orthogonality_error(q: u64) -> f64 {
        let chars = characters(q).unwrap();
        let phi = euler_phi(q) as f64;
        let tables: Vec<_> = chars.iter().map(|c| c.value_table()).collect();
        let mut worst = 0f64;
        for (i, ti) in tables.iter().enumerate() {
            for (j, tj) in tables.iter().enumerate() {
                let s: Complex64 = ti.iter().zip(tj).map(|(a, b)| a * b.conj()).sum();
                let expected = if i == j { phi } else { 0.0 };
                worst = worst.max((s - expected).norm());
            }
        }
        worst
    }

    #[test]
    fn orthogonality_small_moduli() {
        for q in 1..=24 {
            assert!(orthogonality_error(q) < 1e-9, "q = {q}");
        }
    }

    #[test]
    fn periodicity_is_exact() {
        for q in 1..=24 {
            for chi in characters(q).unwrap() {
                for n in 0..3 * q {
                    assert_eq!(chi.angle(n), chi.angle(n + q));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn multiplicativity(q in 1u64..=24, m in 0u64..100_000, n in 0u64..100_000) {
            for chi in characters(q).unwrap() {
                let lhs = chi.eval(m * n);
                let rhs = chi.eval(m) * chi.eval(n);
                prop_assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn twisted_sum_examples() {
        let chi = &characters(1).unwrap()[0];
        let r = twisted_sum(chi, 500).unwrap();
        assert_eq!(r.re_s, crate::ap::sum_a(500).unwrap() as f64);
        assert_eq!(r.im_s, 0.0);

        for q in [3, 10, 12] {
            let chi0 = &characters(q).unwrap()[0];
            let r = twisted_sum(chi0, 3000).unwrap();
            let oracle: u64 = (1..=3000u64)
                .filter(|n| n.gcd(&q) == 1)
                .map(|n| exact::a_u64(n).unwrap())
                .sum();
            assert_eq!(r.re_s, oracle as f64);
            assert_eq!(r.im_s, 0.0);
            assert!(r.main_term > 0.0);
        }
        let chi1 = &characters(3).unwrap()[1];
        assert_eq!(twisted_sum(chi1, 10).unwrap().main_term, 0.0);
    }

    #[test]
    fn reconstruct_examples() {
        let r = ap_reconstruct(0, 1, 777).unwrap();
        assert_eq!(r.re, crate::ap::sum_a(777).unwrap() as f64);
        for (b, q, x) in [(1, 3, 1000), (5, 8, 10_000)] {
            let direct = crate::ap::sum_a_ap(&ApQuery::new(b, q, x).unwrap()) as f64;
            let r = ap_reconstruct(b, q, x).unwrap();
            assert!((r.re - direct).abs() < 1e-6 * direct);
            assert!(r.im.abs() < 1e-6 * direct);
        }
        assert!(matches!(ap_reconstruct(2, 4, 100), Err(Error::Parameter(_))));
    }
}
