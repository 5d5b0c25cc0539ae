use super::PadicRational;
use crate::error::{Error, Result};

pub(super) fn parse_coords(p: u64, text: &str) -> Result<Vec<PadicRational>> {
    text.split(',')
        .map(|tok| parse_coord(p, tok.trim()))
        .collect()
}

/// Accepts `a`, `a/b`, `a/p^k` and finite decimals. The value must reduce to
/// `m / p^k` exactly.
fn parse_coord(p: u64, tok: &str) -> Result<PadicRational> {
    let bad = |why: &str| Error::invalid(format!("cannot parse coordinate `{tok}`: {why}"));
    if tok.is_empty() {
        return Err(bad("empty"));
    }
    let (num, den): (i128, i128) = if let Some((a, b)) = tok.split_once('/') {
        let a: i128 = a.trim().parse().map_err(|_| bad("bad numerator"))?;
        let b = b.trim();
        let den = if let Some((base, k)) = b.split_once('^') {
            let base: i128 = base.trim().parse().map_err(|_| bad("bad base"))?;
            let k: u32 = k.trim().parse().map_err(|_| bad("bad exponent"))?;
            base.checked_pow(k).ok_or_else(|| bad("denominator overflows"))?
        } else {
            b.parse().map_err(|_| bad("bad denominator"))?
        };
        (a, den)
    } else if let Some((int, frac)) = tok.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_abs: i128 = int
            .trim_start_matches(['-', '+'])
            .parse::<i128>()
            .or_else(|e| if int.trim_start_matches(['-', '+']).is_empty() { Ok(0) } else { Err(e) })
            .map_err(|_| bad("bad integer part"))?;
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad("bad fractional part"));
        }
        let scale = 10i128
            .checked_pow(frac.len() as u32)
            .ok_or_else(|| bad("too many digits"))?;
        let f: i128 = frac.parse().map_err(|_| bad("bad fractional part"))?;
        let mag = int_abs
            .checked_mul(scale)
            .and_then(|v| v.checked_add(f))
            .ok_or_else(|| bad("too many digits"))?;
        (if neg { -mag } else { mag }, scale)
    } else {
        (tok.parse().map_err(|_| bad("not a number"))?, 1)
    };
    if den <= 0 {
        return Err(bad("denominator must be positive"));
    }
    let g = gcd(num.unsigned_abs(), den as u128) as i128;
    let (num, mut den) = (num / g.max(1), den / g.max(1));
    if num == 0 {
        den = 1;
    }
    let mut exp = 0u32;
    let p = p as i128;
    while den > 1 {
        if den % p != 0 {
            return Err(bad("denominator is not a power of p"));
        }
        den /= p;
        exp += 1;
    }
    let num = i64::try_from(num).map_err(|_| bad("numerator overflows"))?;
    Ok(PadicRational::reduce(p as u64, num, exp))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pr(p: u64, tok: &str) -> Result<PadicRational> {
        parse_coord(p, tok)
    }

    #[test]
    fn accepted_forms() {
        assert_eq!(pr(2, "1/2").unwrap(), PadicRational::reduce(2, 1, 1));
        assert_eq!(pr(2, "0.5").unwrap(), PadicRational::reduce(2, 1, 1));
        assert_eq!(pr(2, "-0.25").unwrap(), PadicRational::reduce(2, -1, 2));
        assert_eq!(pr(2, "3/2^3").unwrap(), PadicRational::reduce(2, 3, 3));
        assert_eq!(pr(3, "6/9").unwrap(), PadicRational::reduce(3, 2, 1));
        assert_eq!(pr(5, "-7").unwrap(), PadicRational::integer(-7));
        assert_eq!(pr(2, "0").unwrap(), PadicRational::ZERO);
        assert_eq!(pr(2, "-.5").unwrap(), PadicRational::reduce(2, -1, 1));
    }

    #[test]
    fn rejects_unrepresentable() {
        assert!(pr(2, "0.1").is_err());
        assert!(pr(3, "1/2").is_err());
        assert!(pr(2, "1/0").is_err());
        assert!(pr(2, "abc").is_err());
        assert!(pr(2, "").is_err());
    }
}
