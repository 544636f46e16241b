//! Exact arithmetic in prime fields `F_q`.
//!
//! Everything downstream (encoders, decoders, audits) assumes exact field
//! arithmetic, so elements are plain `u64` residues with `u128` intermediate
//! products and no floating point anywhere. Only prime moduli are supported;
//! extension fields are out of scope for this module.
//!
//! The module also owns the two number-theoretic tools the scalar
//! multiplication scheme needs: the smallest prime above a bound (the scheme
//! works in `F_p` with `p` the smallest prime exceeding `2(q-1)`, and
//! Bertrand's postulate keeps `p < 4(q-1)`), and the isomorphism between the
//! multiplicative group `F_q^x` and the additive group `Z_{q-1}` realized by
//! discrete-log and power tables with respect to the smallest generator.

use crate::{Error, Result};

/// Deterministic Miller-Rabin primality test, exact for all `u64` inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    // This witness set decides primality for every n < 3.3 * 10^24.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least prime strictly greater than `n`.
pub fn smallest_prime_above(n: u64) -> u64 {
    let mut candidate = n + 1;
    loop {
        if is_prime(candidate) {
            return candidate;
        }
        candidate += 1;
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut base = base % m;
    let mut acc = 1u64 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// A prime field `F_q`, carried by value everywhere an element or matrix
/// needs to know its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    /// Builds the field, rejecting composite or undersized moduli.
    pub fn new(q: u64) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(PrimeField { q })
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Wraps an integer into the field, reducing mod q.
    pub fn elem(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.q,
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElement {
        self.elem(1)
    }

    /// All field elements in ascending residue order.
    pub fn iter(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |v| self.elem(v))
    }
}

/// An element of a specific prime field. Arithmetic between elements of
/// different fields is a programming error and panics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn pow(&self, exp: u64) -> FieldElement {
        FieldElement {
            value: pow_mod(self.value, exp, self.field.q),
            field: self.field,
        }
    }

    /// Multiplicative inverse via Fermat's little theorem. Zero is the one
    /// non-invertible element and yields an error rather than a panic so
    /// callers can surface it as a validation failure.
    pub fn inverse(&self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::ZeroInverse(self.field.q));
        }
        Ok(self.pow(self.field.q - 2))
    }
}

fn check_same_field(a: &FieldElement, b: &FieldElement) {
    assert_eq!(
        a.field.q, b.field.q,
        "mixed field elements: F_{} vs F_{}",
        a.field.q, b.field.q
    );
}

impl std::ops::Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        check_same_field(&self, &rhs);
        let sum = self.value + rhs.value;
        FieldElement {
            value: if sum >= self.field.q { sum - self.field.q } else { sum },
            field: self.field,
        }
    }
}

impl std::ops::Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        check_same_field(&self, &rhs);
        let value = if self.value >= rhs.value {
            self.value - rhs.value
        } else {
            self.value + self.field.q - rhs.value
        };
        FieldElement { value, field: self.field }
    }
}

impl std::ops::Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        check_same_field(&self, &rhs);
        FieldElement {
            value: mul_mod(self.value, rhs.value, self.field.q),
            field: self.field,
        }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: if self.value == 0 { 0 } else { self.field.q - self.value },
            field: self.field,
        }
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// The isomorphism between `F_q^x` (multiplicative) and `Z_{q-1}` (additive),
/// realized as dense discrete-log and power tables. `f(a)` is the discrete
/// log of `a` with respect to the smallest generator of `F_q^x`; by
/// convention `f(0) = 0`, with zero inputs signalled out of band by the
/// caller (the scalar scheme ships explicit zero-indicator bits).
#[derive(Clone, Debug)]
pub struct MultIsomorphism {
    field: PrimeField,
    generator: u64,
    /// `log_table[a] = i` with `g^i = a`, for `a` in `1..q`. Index 0 holds
    /// the conventional value 0.
    log_table: Vec<u64>,
    /// `exp_table[i] = g^i`, for `i` in `0..q-1`.
    exp_table: Vec<u64>,
    /// Smallest prime exceeding `2(q-1)`; the scalar scheme shares discrete
    /// logs over `F_p` so that sums of two logs never wrap.
    aux_prime: u64,
}

impl MultIsomorphism {
    pub fn new(field: PrimeField) -> Result<Self> {
        let q = field.q;
        if q < 3 {
            return Err(Error::InvalidConfig(format!(
                "multiplicative structure of F_{q} is trivial; need q >= 3"
            )));
        }
        let generator = smallest_generator(q);
        let mut log_table = vec![0u64; q as usize];
        let mut exp_table = vec![0u64; (q - 1) as usize];
        let mut power = 1u64;
        for i in 0..q - 1 {
            exp_table[i as usize] = power;
            log_table[power as usize] = i;
            power = mul_mod(power, generator, q);
        }
        debug_assert_eq!(power, 1, "generator order must be q-1");
        Ok(MultIsomorphism {
            field,
            generator,
            log_table,
            exp_table,
            aux_prime: smallest_prime_above(2 * (q - 1)),
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// Smallest prime above `2(q-1)`. Bertrand's postulate guarantees it is
    /// below `4(q-1)`, which caps the scalar scheme's per-symbol download.
    pub fn aux_prime(&self) -> u64 {
        self.aux_prime
    }

    /// Discrete log of `a`, with the `f(0) = 0` convention.
    pub fn log(&self, a: FieldElement) -> u64 {
        assert_eq!(a.field.q, self.field.q, "element from a different field");
        self.log_table[a.value as usize]
    }

    /// Inverse direction: `exp(i) = g^i` for `i` in `0..q-1`.
    pub fn exp(&self, i: u64) -> FieldElement {
        self.field.elem(self.exp_table[(i % (self.field.q - 1)) as usize])
    }
}

/// Smallest generator of `F_q^x`: the least `g >= 2` with `g^((q-1)/r) != 1`
/// for every prime factor `r` of `q-1`.
fn smallest_generator(q: u64) -> u64 {
    let group_order = q - 1;
    let prime_factors = distinct_prime_factors(group_order);
    'candidate: for g in 2..q {
        for &r in &prime_factors {
            if pow_mod(g, group_order / r, q) == 1 {
                continue 'candidate;
            }
        }
        return g;
    }
    unreachable!("every prime field has a generator");
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    factors
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(q: u64) -> PrimeField {
        PrimeField::new(q).unwrap()
    }

    /// Independent oracle: find the inverse by exhaustive search.
    fn inverse_by_search(q: u64, a: u64) -> Option<u64> {
        (1..q).find(|&b| (a as u128 * b as u128) % q as u128 == 1)
    }

    /// Independent oracle: primes below a bound by sieve.
    fn sieve(limit: usize) -> Vec<u64> {
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for n in 2..=limit {
            if !composite[n] {
                primes.push(n as u64);
                let mut m = n * n;
                while m <= limit {
                    composite[m] = true;
                    m += n;
                }
            }
        }
        primes
    }

    #[test]
    fn rejects_composite_modulus() {
        assert_eq!(PrimeField::new(6), Err(Error::NotPrime(6)));
        assert_eq!(PrimeField::new(1), Err(Error::NotPrime(1)));
        assert!(PrimeField::new(2).is_ok());
    }

    #[test]
    fn inverse_matches_search_oracle() {
        assert_eq!(f(7).elem(3).inverse().unwrap().value(), 5);
        assert_eq!(inverse_by_search(7, 3), Some(5));
        assert_eq!(f(5).elem(4).inverse().unwrap().value(), 4);
        assert_eq!(inverse_by_search(5, 4), Some(4));
        for q in [2u64, 3, 5, 7, 11, 13, 101] {
            let field = f(q);
            for a in 1..q {
                assert_eq!(
                    field.elem(a).inverse().unwrap().value(),
                    inverse_by_search(q, a).unwrap(),
                    "inverse of {a} in F_{q}"
                );
            }
        }
    }

    #[test]
    fn inverse_of_zero_is_an_error() {
        assert_eq!(f(11).zero().inverse(), Err(Error::ZeroInverse(11)));
    }

    #[test]
    fn prime_stepping_matches_sieve_oracle() {
        assert_eq!(smallest_prime_above(8), 11);
        assert_eq!(smallest_prime_above(2), 3);
        assert_eq!(smallest_prime_above(4), 5);
        let primes = sieve(10_000);
        for n in 0..5_000u64 {
            let expected = *primes.iter().find(|&&p| p > n).unwrap();
            assert_eq!(smallest_prime_above(n), expected, "least prime above {n}");
        }
        assert_eq!(
            primes,
            (0..primes.len() as u64).scan(0, |prev, _| {
                *prev = smallest_prime_above(*prev);
                Some(*prev)
            }).collect::<Vec<_>>()
        );
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let primes = sieve(10_000);
        for n in 0..=10_000u64 {
            assert_eq!(is_prime(n), primes.binary_search(&n).is_ok(), "n = {n}");
        }
    }

    #[test]
    fn isomorphism_tables_for_f5() {
        let iso = MultIsomorphism::new(f(5)).unwrap();
        assert_eq!(iso.generator(), 2);
        assert_eq!(iso.log(f(5).elem(1)), 0);
        assert_eq!(iso.log(f(5).elem(2)), 1);
        assert_eq!(iso.log(f(5).elem(4)), 2);
        assert_eq!(iso.log(f(5).elem(3)), 3);
        for i in 0..4 {
            assert_eq!(iso.log(iso.exp(i)), i);
        }
        assert_eq!(iso.aux_prime(), 11);
    }

    #[test]
    fn generator_is_smallest_by_brute_force() {
        for q in [3u64, 5, 7, 11, 13, 17, 101, 257] {
            let iso = MultIsomorphism::new(f(q)).unwrap();
            let brute = (2..q)
                .find(|&g| {
                    let mut seen = 0u64;
                    let mut p = 1u64;
                    loop {
                        p = (p as u128 * g as u128 % q as u128) as u64;
                        seen += 1;
                        if p == 1 {
                            break;
                        }
                    }
                    seen == q - 1
                })
                .unwrap();
            assert_eq!(iso.generator(), brute, "smallest generator of F_{q}");
        }
    }

    #[test]
    fn log_is_a_group_homomorphism() {
        // f(a*b) = f(a) + f(b) mod (q-1), exhaustively for every prime q <= 257.
        for q in sieve(257) {
            if q < 3 {
                continue;
            }
            let field = f(q);
            let iso = MultIsomorphism::new(field).unwrap();
            for a in 1..q {
                for b in 1..q {
                    let lhs = iso.log(field.elem(a) * field.elem(b));
                    let rhs = (iso.log(field.elem(a)) + iso.log(field.elem(b))) % (q - 1);
                    assert_eq!(lhs, rhs, "q={q} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn auxiliary_prime_preserves_log_sums() {
        // ((a+b) mod p) mod (q-1) = (a+b) mod (q-1) whenever a, b < q-1 and
        // p > 2(q-1), exhaustively for every prime q <= 101.
        for q in sieve(101) {
            if q < 3 {
                continue;
            }
            let p = smallest_prime_above(2 * (q - 1));
            assert!(p > 2 * (q - 1) && p < 4 * (q - 1).max(2));
            for a in 0..q - 1 {
                for b in 0..q - 1 {
                    assert_eq!(((a + b) % p) % (q - 1), (a + b) % (q - 1), "q={q} a={a} b={b}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn field_arithmetic_laws(q_idx in 0usize..5, a in 0u64..1000, b in 0u64..1000, c in 0u64..1000) {
            let q = [3u64, 5, 7, 101, 65537][q_idx];
            let field = f(q);
            let (a, b, c) = (field.elem(a), field.elem(b), field.elem(c));
            prop_assert_eq!(a + b, b + a);
            prop_assert_eq!(a * b, b * a);
            prop_assert_eq!((a + b) + c, a + (b + c));
            prop_assert_eq!((a * b) * c, a * (b * c));
            prop_assert_eq!(a * (b + c), a * b + a * c);
            prop_assert_eq!(a - a, field.zero());
            prop_assert_eq!(a + -a, field.zero());
            if !a.is_zero() {
                prop_assert_eq!(a * a.inverse().unwrap(), field.one());
            }
        }

        #[test]
        fn exp_log_round_trip(q_idx in 0usize..4, a in 1u64..65537) {
            let q = [3u64, 5, 101, 65537][q_idx];
            let field = f(q);
            let iso = MultIsomorphism::new(field).unwrap();
            let a = field.elem(1 + a % (q - 1));
            prop_assert_eq!(iso.exp(iso.log(a)), a);
        }
    }
}
