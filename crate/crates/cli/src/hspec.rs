//! Parser for the `--h` argument: a polynomial in `zeta` and `h` with integer
//! coefficients, such as `h`, `zeta*h + 2h^2` or `h - zeta^3`.

use std::sync::Arc;

use shtuka_core::trunc::{TruncElem, TruncRing};

pub fn parse(spec: &str, ring: &Arc<TruncRing>) -> Result<TruncElem, String> {
    let s: String = spec.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty h expression".into());
    }
    let mut total = TruncElem::zero(ring);
    let mut rest = s.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let negative = match rest.as_bytes()[0] {
            b'+' => {
                rest = &rest[1..];
                false
            }
            b'-' => {
                rest = &rest[1..];
                true
            }
            _ if first => false,
            _ => return Err(format!("expected + or - before \"{rest}\"")),
        };
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = parse_term(&rest[..end], ring)?;
        total = if negative { total.sub(&term) } else { total.add(&term) };
        rest = &rest[end..];
    }
    Ok(total)
}

fn parse_term(term: &str, ring: &Arc<TruncRing>) -> Result<TruncElem, String> {
    if term.is_empty() {
        return Err("empty term".into());
    }
    let digits = term.len() - term.trim_start_matches(|c: char| c.is_ascii_digit()).len();
    let coeff: i64 = if digits == 0 { 1 } else { term[..digits].parse().map_err(|_| format!("bad coefficient in \"{term}\""))? };
    let mut value = TruncElem::from_int(ring, coeff);
    let factors = term[digits..].trim_start_matches('*');
    if factors.is_empty() {
        return Ok(value);
    }
    for factor in factors.split('*') {
        let (name, exp) = match factor.split_once('^') {
            Some((n, e)) => (n, e.parse::<u64>().map_err(|_| format!("bad exponent in \"{factor}\""))?),
            None => (factor, 1),
        };
        let base = match name {
            "zeta" | "ζ" => TruncElem::zeta(ring),
            "h" => TruncElem::h(ring),
            _ => return Err(format!("unknown symbol \"{name}\" (use zeta and h)")),
        };
        value = value.mul(&base.pow(exp));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use shtuka_core::fq::Fq;

    #[test]
    fn parses_polynomials() {
        let r = TruncRing::new(&Fq::of_size(3).unwrap(), 9).unwrap();
        let h = TruncElem::h(&r);
        let z = TruncElem::zeta(&r);
        assert_eq!(parse("h", &r).unwrap(), h);
        assert_eq!(parse(" zeta*h + 2h^2 ", &r).unwrap(), z.mul(&h).add(&h.mul(&h).mul(&TruncElem::from_int(&r, 2))));
        assert_eq!(parse("h-ζ^3", &r).unwrap(), h.sub(&z.pow(3)));
        assert_eq!(parse("1", &r).unwrap(), TruncElem::one(&r));
        assert!(parse("x", &r).is_err());
        assert!(parse("h++h", &r).is_err());
        assert!(parse("", &r).is_err());
    }
}
