//! Closed-form genera, dimensions and component counts over `(p, q, g)`.
//!
//! CSV columns, in order: `p, q, g, deg_l, g_s, g_sbar, g_c,
//! riemann_hurwitz, stack_dim, fiber_exponent, fiber_order, prym_dim,
//! torsor_exponent, torsor_order, exponent_identity, consistent`. Fiber
//! columns are empty for `q >= 3`.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::langlands::stack_dimension;
use crate::spectral::cover_genera;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusParams {
    pub p: u64,
    pub q: u64,
    pub g: u64,
    #[serde(default)]
    pub deg_l: Option<i64>,
}

impl CensusParams {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.g < 2 {
            return Err(Error::Schema(format!("need p >= 1 and g >= 2, got p={}, g={}", self.p, self.g)));
        }
        Ok(())
    }

    /// `deg L`, by default `deg K^p = 2p(g-1)`.
    pub fn deg_l(&self) -> i64 {
        self.deg_l.unwrap_or(2 * (self.p * (self.g - 1)) as i64)
    }
}

fn decimal<S: serde::Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&n.to_string())
}

pub fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberOrder {
    pub exponent: u64,
    #[serde(serialize_with = "decimal")]
    pub order: BigUint,
    /// Dimension of the continuous part `Prym(C, Sigma)` for `q = 2`.
    pub prym_dim: Option<u64>,
}

pub fn fiber_exponent(p: u64, g: u64) -> u64 {
    (4 * p * p + 2 * p) * (g - 1) + 1
}

/// Discrete part `Z_2^{(4p^2+2p)(g-1)+1}` of the generic fiber; for `q = 2`
/// also `dim Prym(C, Sigma) = g_C - g`.
pub fn fiber_order(params: &CensusParams) -> Result<FiberOrder> {
    params.validate()?;
    let exponent = fiber_exponent(params.p, params.g);
    let prym_dim = match params.q {
        1 => None,
        2 => Some(cover_genera(params.p, params.g).g_c - params.g),
        q => {
            return Err(Error::Unsupported(format!(
                "q = {q}: fibers mix abelian and non-abelian data; use build-extension on explicit (V_0, Q_0)"
            )))
        }
    };
    Ok(FiberOrder {
        exponent,
        order: pow2(exponent),
        prym_dim,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsorOrder {
    pub exponent: u64,
    #[serde(serialize_with = "decimal")]
    pub order: BigUint,
    /// `2 g_Sbar + 4p(g-1) - 1 = (4p^2+2p)(g-1) + 1`.
    pub exponent_identity: bool,
}

pub fn torsor_order(p: u64, g: u64) -> TorsorOrder {
    let exponent = 4 * p * (g - 1) - 1;
    let lhs = 2 * cover_genera(p, g).g_sbar + exponent;
    TorsorOrder {
        exponent,
        order: pow2(exponent),
        exponent_identity: lhs == fiber_exponent(p, g),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GothenCounts {
    #[serde(serialize_with = "decimal")]
    pub total: BigUint,
    #[serde(serialize_with = "decimal")]
    pub hitchin: BigUint,
    #[serde(serialize_with = "decimal")]
    pub extra: BigUint,
    #[serde(serialize_with = "decimal")]
    pub remaining: BigUint,
    pub parts_sum: bool,
}

/// `3 * 2^{2g} + 2g - 4` split as `2^{2g} + (2g - 2) + 2(2^{2g} - 1)`.
pub fn gothen_counts(g: u64) -> GothenCounts {
    let t = pow2(2 * g);
    let total = &t * 3u32 + BigUint::from(2 * g) - 4u32;
    let hitchin = t.clone();
    let extra = BigUint::from(2 * g - 2);
    let remaining = (&t - 1u32) * 2u32;
    let parts_sum = &hitchin + &extra + &remaining == total;
    GothenCounts {
        total,
        hitchin,
        extra,
        remaining,
        parts_sum,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusRow {
    pub p: u64,
    pub q: u64,
    pub g: u64,
    pub deg_l: i64,
    pub g_s: u64,
    pub g_sbar: u64,
    pub g_c: u64,
    pub riemann_hurwitz: bool,
    pub stack_dim: i64,
    pub fiber_exponent: Option<u64>,
    pub fiber_order: Option<String>,
    pub prym_dim: Option<u64>,
    pub torsor_exponent: u64,
    pub torsor_order: String,
    pub exponent_identity: bool,
    pub consistent: bool,
}

pub fn census_row(params: &CensusParams) -> Result<CensusRow> {
    params.validate()?;
    let CensusParams { p, q, g, .. } = *params;
    let cg = cover_genera(p, g);
    let deg_l = params.deg_l();
    let fiber = fiber_order(params).ok();
    let torsor = torsor_order(p, g);
    let prym_ok = fiber
        .as_ref()
        .and_then(|f| f.prym_dim)
        .is_none_or(|d| d == (2 * p + 1) * (g - 1));
    Ok(CensusRow {
        p,
        q,
        g,
        deg_l,
        g_s: cg.g_s,
        g_sbar: cg.g_sbar,
        g_c: cg.g_c,
        riemann_hurwitz: cg.riemann_hurwitz,
        stack_dim: stack_dimension(q as i64, g as i64, deg_l),
        fiber_exponent: fiber.as_ref().map(|f| f.exponent),
        fiber_order: fiber.as_ref().map(|f| f.order.to_string()),
        prym_dim: fiber.as_ref().and_then(|f| f.prym_dim),
        torsor_exponent: torsor.exponent,
        torsor_order: torsor.order.to_string(),
        exponent_identity: torsor.exponent_identity,
        consistent: cg.riemann_hurwitz && torsor.exponent_identity && prym_ok,
    })
}

/// Inclusive ranges; rows ordered by `(p, q, g)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusRanges {
    pub p: [u64; 2],
    pub q: [u64; 2],
    pub g: [u64; 2],
    #[serde(default)]
    pub deg_l: Option<i64>,
}

impl CensusRanges {
    pub fn params(&self) -> Vec<CensusParams> {
        let mut out = vec![];
        for p in self.p[0]..=self.p[1] {
            for q in self.q[0]..=self.q[1] {
                for g in self.g[0]..=self.g[1] {
                    out.push(CensusParams {
                        p,
                        q,
                        g,
                        deg_l: self.deg_l,
                    });
                }
            }
        }
        out
    }
}

pub fn census_grid(ranges: &CensusRanges, parallel: bool) -> Result<Vec<CensusRow>> {
    let params = ranges.params();
    if parallel {
        use rayon::prelude::*;
        params.par_iter().map(census_row).collect()
    } else {
        params.iter().map(census_row).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(p: u64, q: u64, g: u64) -> CensusParams {
        CensusParams { p, q, g, deg_l: None }
    }

    #[test]
    fn fiber_examples() {
        let f = fiber_order(&params(1, 2, 2)).unwrap();
        assert_eq!(f.order, BigUint::from(128u32));
        assert_eq!(f.prym_dim, Some(3));
        assert_eq!(fiber_order(&params(2, 1, 2)).unwrap().order, pow2(21));
        assert!(matches!(fiber_order(&params(1, 3, 2)), Err(Error::Unsupported(_))));
    }

    #[test]
    fn torsor_examples() {
        let t = torsor_order(1, 2);
        assert_eq!(t.order, BigUint::from(8u32));
        assert!(t.exponent_identity);
        assert_eq!(2 * cover_genera(2, 3).g_sbar + torsor_order(2, 3).exponent, 41);
        assert_eq!(2 * cover_genera(1, 2).g_sbar + torsor_order(1, 2).exponent, 7);
    }

    #[test]
    fn gothen_examples() {
        let c = gothen_counts(2);
        assert_eq!(
            (c.total, c.hitchin, c.extra, c.remaining),
            (48u32.into(), 16u32.into(), 2u32.into(), 30u32.into())
        );
        assert_eq!(gothen_counts(3).total, BigUint::from(194u32));
        assert!((2..=10).all(|g| gothen_counts(g).parts_sum));
    }

    #[test]
    fn grid_examples() {
        let r = CensusRanges {
            p: [1, 2],
            q: [1, 2],
            g: [2, 3],
            deg_l: None,
        };
        let rows = census_grid(&r, false).unwrap();
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r.consistent));
        assert_eq!(rows, census_grid(&r, true).unwrap());
        let row = rows.iter().find(|r| (r.p, r.q, r.g) == (2, 2, 2)).unwrap();
        assert_eq!((row.g_s, row.g_sbar), (17, 7));
        let empty = CensusRanges {
            p: [2, 1],
            ..r
        };
        assert!(census_grid(&empty, false).unwrap().is_empty());
    }
}
