//! Truncated formal power series with exact rational coefficients.
//!
//! A [`PowerSeries`] holds coefficients `0..=order` of a series in one
//! variable. All arithmetic is exact and truncates at the smaller order of
//! the operands; there is no floating-point fallback anywhere.

use crate::{Error, Rat, Result};
use num_traits::{One, Zero};

/// Dense truncated series: `coeffs[n]` is the coefficient of `var^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    var: String,
    coeffs: Vec<Rat>,
}

impl PowerSeries {
    pub fn from_coeffs(var: &str, coeffs: Vec<Rat>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        PowerSeries { var: var.into(), coeffs }
    }

    pub fn zero(var: &str, order: usize) -> Self {
        PowerSeries { var: var.into(), coeffs: vec![Rat::zero(); order + 1] }
    }

    pub fn constant(var: &str, c: Rat, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        s.coeffs[0] = c;
        s
    }

    pub fn one(var: &str, order: usize) -> Self {
        Self::constant(var, Rat::one(), order)
    }

    /// The identity series `var`.
    pub fn identity(var: &str, order: usize) -> Self {
        let mut s = Self::zero(var, order);
        if order >= 1 {
            s.coeffs[1] = Rat::one();
        }
        s
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// Truncation order (largest tracked exponent).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `var^n`; zero beyond the truncation order.
    pub fn coeff(&self, n: usize) -> Rat {
        self.coeffs.get(n).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Rat::is_zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.truncate(order + 1);
        coeffs.resize(order + 1, Rat::zero());
        PowerSeries { var: self.var.clone(), coeffs }
    }

    fn common_order(&self, other: &Self) -> usize {
        self.order().min(other.order())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let coeffs = (0..=n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let coeffs = (0..=n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn neg(&self) -> Self {
        let coeffs = self.coeffs.iter().map(|c| -c.clone()).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let coeffs = self.coeffs.iter().map(|a| a * c).collect();
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn add_constant(&self, c: &Rat) -> Self {
        let mut s = self.clone();
        s.coeffs[0] += c;
        s
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common_order(other);
        let mut coeffs = vec![Rat::zero(); n + 1];
        for i in 0..=n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=(n - i) {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                coeffs[i + j] += &self.coeffs[i] * &other.coeffs[j];
            }
        }
        PowerSeries { var: self.var.clone(), coeffs }
    }

    /// Multiply by `var^k` (drops the top `k` coefficients).
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut coeffs = vec![Rat::zero(); n + 1];
        for i in 0..=n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i].clone();
        }
        PowerSeries { var: self.var.clone(), coeffs }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::one(&self.var, self.order());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Division; the divisor must have an invertible (nonzero) constant term.
    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.coeffs[0].is_zero() {
            return Err(Error::BadParameter(
                "series division requires an invertible constant term".into(),
            ));
        }
        let n = self.common_order(other);
        let inv0 = Rat::one() / other.coeffs[0].clone();
        let mut coeffs = vec![Rat::zero(); n + 1];
        for i in 0..=n {
            let mut acc = self.coeff(i);
            for j in 0..i {
                acc -= &coeffs[j] * &other.coeffs[i - j];
            }
            coeffs[i] = acc * &inv0;
        }
        Ok(PowerSeries { var: self.var.clone(), coeffs })
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut coeffs = vec![Rat::zero(); n + 1];
        for i in 1..=n {
            coeffs[i - 1] = &self.coeffs[i] * Rat::from_integer(i.into());
        }
        PowerSeries { var: self.var.clone(), coeffs }
    }

    /// Substitute `inner` (with zero constant term) into `self`, by Horner.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeffs[0].is_zero() {
            return Err(Error::BadParameter(
                "series composition requires an inner series with zero constant term".into(),
            ));
        }
        let n = self.order().min(inner.order());
        let mut acc = PowerSeries::constant(&inner.var, self.coeff(n), n);
        for i in (0..n).rev() {
            acc = acc.mul(inner).add_constant(&self.coeff(i));
        }
        Ok(acc.truncate(n))
    }

    /// Compositional inverse by Newton iteration: returns `g` with
    /// `self(g(x)) = x`. Requires `self[0] = 0` and `self[1]` invertible.
    pub fn reversion(&self, out_var: &str) -> Result<Self> {
        if !self.coeffs[0].is_zero() || self.coeff(1).is_zero() {
            return Err(Error::BadParameter(
                "reversion needs a series with zero constant term and invertible linear term".into(),
            ));
        }
        let n = self.order();
        let phi_prime = self.derivative();
        let mut g = PowerSeries::identity(out_var, n).scale(&(Rat::one() / self.coeff(1)));
        let x = PowerSeries::identity(out_var, n);
        // each step doubles the number of correct coefficients
        let steps = usize::BITS - n.leading_zeros() + 2;
        for _ in 0..steps {
            let residual = self.compose(&g)?.sub(&x);
            if residual.is_zero() {
                break;
            }
            let slope = phi_prime.compose(&g)?;
            g = g.sub(&residual.div(&slope)?);
        }
        Ok(g)
    }
}

impl std::fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*{}", self.var)?,
                _ => write!(f, "{c}*{}^{i}", self.var)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.var, self.order() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn geom(order: usize) -> PowerSeries {
        // 1/(1-x) = 1 + x + x^2 + ...
        let one = PowerSeries::one("x", order);
        let denom = one.sub(&PowerSeries::identity("x", order));
        one.div(&denom).unwrap()
    }

    #[test]
    fn division_geometric() {
        let g = geom(6);
        assert!(g.coeffs().iter().all(|c| c == &rat(1, 1)));
    }

    #[test]
    fn compose_substitutes() {
        // 1/(1-x) at x = 2y: coefficients 2^n
        let g = geom(5);
        let inner = PowerSeries::identity("y", 5).scale(&rat(2, 1));
        let h = g.compose(&inner).unwrap();
        for n in 0..=5 {
            assert_eq!(h.coeff(n), rat(1 << n, 1));
        }
    }

    #[test]
    fn reversion_round_trip() {
        // phi(u) = u - 2u^2 + u^3, the inversion used by the non-separable series
        let order = 8;
        let u = PowerSeries::identity("u", order);
        let phi = u.sub(&u.pow(2).scale(&rat(2, 1))).add(&u.pow(3));
        let g = phi.reversion("x").unwrap();
        assert_eq!(g.coeff(1), rat(1, 1));
        assert_eq!(g.coeff(2), rat(2, 1));
        assert_eq!(g.coeff(3), rat(7, 1));
        let x = PowerSeries::identity("x", order);
        assert_eq!(phi.compose(&g).unwrap(), x);
    }

    #[test]
    fn derivative_of_product() {
        let a = geom(6);
        let b = PowerSeries::identity("x", 6).add(&PowerSeries::one("x", 6));
        let lhs = a.mul(&b).derivative().truncate(5);
        let rhs = a.derivative().mul(&b).add(&a.mul(&b.derivative())).truncate(5);
        assert_eq!(lhs, rhs);
    }
}
