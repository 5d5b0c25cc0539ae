use std::collections::HashMap;

use serde::Serialize;

use super::{checked_pow, Group, GroupElement};
use crate::error::{Error, Result};

/// Default cap on the number of ball elements.
pub const DEFAULT_BALL_CAP: usize = 200_000;

/// Upper bound on lattice points scanned per enumerated element cap.
const SCAN_FACTOR: u128 = 64;

/// The closed ball `{g ∈ G_n : L(g) <= r}` in a fixed, reproducible order.
///
/// Elements are sorted by `L`, then lexicographically by coordinate value.
/// This order is the basis order of every truncated Hilbert space.
#[derive(Debug, Clone)]
pub struct BallTable {
    group: Group,
    level: u32,
    radius: f64,
    elements: Vec<GroupElement>,
    index: HashMap<GroupElement, usize>,
}

#[derive(Serialize)]
struct BallJson<'a> {
    p: u64,
    d: usize,
    n: u32,
    r: f64,
    elements: &'a [GroupElement],
}

impl BallTable {
    pub fn group(&self) -> Group {
        self.group
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index.contains_key(g)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.elements.iter()
    }

    /// `{p, d, n, r, elements: [[[num, exp], ...], ...]}`.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(BallJson {
            p: self.group.p(),
            d: self.group.d(),
            n: self.level,
            r: self.radius,
            elements: &self.elements,
        })
        .expect("ball serializes")
    }
}

impl Group {
    /// Exhaustive enumeration of `{g ∈ G_n : L(g) <= r}` with the default cap.
    pub fn ball(&self, n: u32, r: f64) -> Result<BallTable> {
        self.ball_with_cap(n, r, DEFAULT_BALL_CAP)
    }

    /// Scans the lattice box `|x_j| <= r` in `p^{-n}Z` and keeps points with
    /// `L <= r`. Membership is decided on the exact integer
    /// `p^{2n} L^2 = Σ a_j^2 + p^{2(level + n)}` against `r^2 p^{2n}`.
    pub fn ball_with_cap(&self, n: u32, r: f64, cap: usize) -> Result<BallTable> {
        if !(r.is_finite() && r >= 1.0) {
            return Err(Error::invalid(format!("ball radius must be >= 1, got {r}")));
        }
        let p = self.p();
        let d = self.d();
        let scale = checked_pow(p, n).ok_or(Error::Overflow)?;
        let scale2 = checked_pow(p, 2 * n).ok_or(Error::Overflow)? as f64;
        let bound = (r * scale as f64).floor();
        if bound > i64::MAX as f64 / 4.0 {
            return Err(Error::Overflow);
        }
        let bound = bound as i64;
        let side = 2 * bound as u128 + 1;
        let box_size = side.checked_pow(d as u32).unwrap_or(u128::MAX);
        if box_size > SCAN_FACTOR * cap as u128 {
            return Err(Error::ResourceCap {
                what: "ball enumeration box",
                size: box_size.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let threshold = r * r * scale2;

        let mut found: Vec<(u128, Vec<i64>)> = Vec::new();
        let mut a = vec![-bound; d];
        'scan: loop {
            let sq: u128 = a.iter().map(|&v| (v as i128 * v as i128) as u128).sum();
            let lvl = level_of_numerators(p, &a, n);
            let f2 = (p as u128).pow(2 * (lvl + n));
            let key = sq + f2;
            if (key as f64) <= threshold {
                if found.len() == cap {
                    return Err(Error::ResourceCap {
                        what: "ball",
                        size: cap + 1,
                        cap,
                    });
                }
                found.push((key, a.clone()));
            }
            let mut j = d;
            loop {
                if j == 0 {
                    break 'scan;
                }
                j -= 1;
                a[j] += 1;
                if a[j] <= bound {
                    break;
                }
                a[j] = -bound;
            }
        }
        found.sort();
        let elements: Vec<GroupElement> = found
            .into_iter()
            .map(|(_, a)| self.at_level(&a, n))
            .collect::<Result<_>>()?;
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, g)| (g.clone(), i))
            .collect();
        Ok(BallTable {
            group: *self,
            level: n,
            radius: r,
            elements,
            index,
        })
    }

    /// `|ball(n, 2r)| / |ball(n, r)|`, an empirical doubling constant.
    pub fn doubling_ratio(&self, n: u32, r: f64) -> Result<f64> {
        let small = self.ball(n, r)?;
        let large = self.ball(n, 2.0 * r)?;
        Ok(large.len() as f64 / small.len() as f64)
    }
}

/// Level of `a / p^n`: `n` minus the smallest p-adic valuation among nonzero
/// numerators, clipped at zero.
fn level_of_numerators(p: u64, a: &[i64], n: u32) -> u32 {
    let p = p as i64;
    let mut min_val = n;
    for &v in a {
        if v == 0 {
            continue;
        }
        let mut val = 0;
        let mut w = v;
        while val < min_val && w % p == 0 {
            w /= p;
            val += 1;
        }
        min_val = min_val.min(val);
        if min_val == 0 {
            break;
        }
    }
    n - min_val
}
