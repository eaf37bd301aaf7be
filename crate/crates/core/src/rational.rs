//! Exact rational helpers used where double precision cancels too much:
//! Bernoulli numbers, Gram-Schmidt on rational polynomials, and exact
//! monomial inner products.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact value of a finite double.
pub(crate) fn from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Nearest double to a rational.
pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Polynomial with exact rational coefficients, ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ExactPoly(pub Vec<BigRational>);

impl ExactPoly {
    pub fn from_f64(coeffs: &[f64]) -> Self {
        ExactPoly(coeffs.iter().copied().map(from_f64).collect())
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.0.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// `self + s * other`
    pub fn axpy(&self, s: &BigRational, other: &ExactPoly) -> ExactPoly {
        let len = self.len().max(other.len());
        ExactPoly(
            (0..len)
                .map(|i| self.coeff(i) + s * other.coeff(i))
                .collect(),
        )
    }

    pub fn scale(&self, s: &BigRational) -> ExactPoly {
        ExactPoly(self.0.iter().map(|c| c * s).collect())
    }

    /// Highest-index nonzero coefficient, if any.
    pub fn leading(&self) -> Option<(usize, &BigRational)> {
        self.0.iter().enumerate().rev().find(|(_, c)| !c.is_zero())
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    /// Multiplies by the least common denominator and divides by the gcd of
    /// the numerators, giving the primitive integer polynomial with a
    /// positive leading coefficient.
    pub fn primitive(&self) -> ExactPoly {
        use num_integer::Integer;
        let lcm = self
            .0
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = match self.leading() {
            Some((_, c)) if c.is_negative() => -BigInt::one(),
            _ => BigInt::one(),
        };
        let g = if g.is_zero() { BigInt::one() } else { g * sign };
        ExactPoly(
            ints.into_iter()
                .map(|c| BigRational::from_integer(c / &g))
                .collect(),
        )
    }
}

/// Numerators over a common denominator.
fn integer_form(p: &ExactPoly) -> (Vec<BigInt>, BigInt) {
    use num_integer::Integer;
    let den = p.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums = p.0.iter().map(|c| c.numer() * (&den / c.denom())).collect();
    (nums, den)
}

/// `∫₀¹ f g` for polynomials given by ascending coefficients, using
/// `∫₀¹ ζ^(i+j) dζ = 1/(i+j+1)`.
///
/// Works on integer numerators throughout and forms a single rational at
/// the end.
pub(crate) fn inner_product(f: &ExactPoly, g: &ExactPoly) -> BigRational {
    use num_integer::Integer;
    if f.len() == 0 || g.len() == 0 {
        return BigRational::zero();
    }
    let (fn_, fd) = integer_form(f);
    let (gn, gd) = integer_form(g);
    let mut by_power = vec![BigInt::zero(); f.len() + g.len() - 1];
    for (i, a) in fn_.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in gn.iter().enumerate() {
            if !b.is_zero() {
                by_power[i + j] += a * b;
            }
        }
    }
    let lcm = (1..=by_power.len()).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)));
    let num = by_power
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_zero())
        .fold(BigInt::zero(), |acc, (p, s)| {
            acc + s * (&lcm / BigInt::from(p + 1))
        });
    BigRational::new(num, lcm * fd * gd)
}
