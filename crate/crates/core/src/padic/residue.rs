use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::prime_field::Prime;

/// An element of `Z/p^j Z`, i.e. of `Z_p / p^j Z_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    p: Prime,
    level: u32,
    rep: BigInt,
}

impl ResidueClass {
    pub fn new(p: Prime, level: u32, rep: &BigInt) -> Self {
        ResidueClass { p, level, rep: rep.mod_floor(&p.pow(level)) }
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Canonical representative in `[0, p^j)`.
    pub fn representative(&self) -> &BigInt {
        &self.rep
    }

    pub fn modulus(&self) -> BigInt {
        self.p.pow(self.level)
    }

    fn check(&self, other: &ResidueClass) -> Result<()> {
        self.p.check_same(other.p)?;
        if self.level != other.level {
            return Err(Error::domain(format!("residue levels differ: {} vs {}", self.level, other.level)));
        }
        Ok(())
    }

    pub fn add(&self, other: &ResidueClass) -> Result<ResidueClass> {
        self.check(other)?;
        Ok(ResidueClass::new(self.p, self.level, &(&self.rep + &other.rep)))
    }

    pub fn mul(&self, other: &ResidueClass) -> Result<ResidueClass> {
        self.check(other)?;
        Ok(ResidueClass::new(self.p, self.level, &(&self.rep * &other.rep)))
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.rep, self.p, self.level)
    }
}
