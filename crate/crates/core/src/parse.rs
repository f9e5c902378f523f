//! Inline generator syntax for ideals of the node.
//!
//! ```text
//! generators = poly { "," poly } ;
//! poly       = [ sign ] term { sign term } ;
//! term       = coeff [ [ "*" ] mono ] | mono ;
//! mono       = ( "x" | "y" ) [ "^" int ] ;
//! coeff      = int [ "/" int ] ;
//! sign       = "+" | "-" ;
//! ```
//!
//! Whitespace is ignored. Mixed monomials are rejected since `xy = 0`.

use std::collections::BTreeMap;

use crate::coeffs::{parse_rational, ArtinScalar, Field, Scalar};
use crate::error::{Error, Result};
use crate::ideals::{field_ring, NodeIdeal};
use crate::node_ring::{NodeRing, NodeSeries};

/// Monomials of the node ring other than the vanishing mixed ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Monomial {
    One,
    X(usize),
    Y(usize),
}

/// A parsed generator as a sparse coefficient map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedPoly {
    pub terms: BTreeMap<Monomial, Scalar>,
    field: Field,
}

impl ParsedPoly {
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| match m {
                Monomial::One => 0,
                Monomial::X(k) | Monomial::Y(k) => *k,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Scalar::is_zero)
    }

    /// The element of `ring`; terms above the truncation are an error.
    pub fn to_series(&self, ring: &NodeRing<ArtinScalar>) -> Result<NodeSeries<ArtinScalar>> {
        if self.degree() > ring.trunc_order() {
            return Err(Error::TruncationTooSmall(ring.trunc_order()));
        }
        let mut z = ring.zero();
        for (m, c) in &self.terms {
            let c = ArtinScalar::from_scalar(c.clone(), 1);
            let t = match m {
                Monomial::One => ring.constant(c),
                Monomial::X(k) => ring.x_term(*k, c),
                Monomial::Y(k) => ring.y_term(*k, c),
            };
            z = z.add(&t);
        }
        Ok(z)
    }
}

fn parse_term(text: &str, field: Field) -> Result<(Monomial, Scalar)> {
    let err = || Error::Parse(format!("bad term {text:?}"));
    let split = text.find(['x', 'y']).unwrap_or(text.len());
    let (coef, mono) = text.split_at(split);
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let c = if coef.is_empty() { field.one() } else { field.from_rational(&parse_rational(coef)?)? };
    if mono.is_empty() {
        return Ok((Monomial::One, c));
    }
    let (var, rest) = mono.split_at(1);
    let exp = match rest.strip_prefix('^') {
        Some(e) => e.parse::<usize>().map_err(|_| err())?,
        None if rest.is_empty() => 1,
        None if rest.contains(['x', 'y']) => {
            return Err(Error::Parse(format!("mixed monomial in {text:?} is zero in the node ring")))
        }
        None => return Err(err()),
    };
    let m = match (var, exp) {
        (_, 0) => Monomial::One,
        ("x", k) => Monomial::X(k),
        (_, k) => Monomial::Y(k),
    };
    Ok((m, c))
}

/// One generator.
pub fn parse_poly(text: &str, field: Field) -> Result<ParsedPoly> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::Parse("empty generator".into()));
    }
    let mut terms: BTreeMap<Monomial, Scalar> = BTreeMap::new();
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut k = 0;
    while k <= bytes.len() {
        // A sign starts a new term unless it follows '^' or '/' or begins the text.
        let boundary = k == bytes.len() || (k > start && matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'^' | b'/' | b'*'));
        if boundary {
            let piece = &s[start..k];
            let (neg, body) = match piece.as_bytes().first() {
                Some(b'-') => (true, &piece[1..]),
                Some(b'+') => (false, &piece[1..]),
                _ => (false, piece),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in {text:?}")));
            }
            let (m, c) = parse_term(body, field)?;
            let c = if neg { -&c } else { c };
            let entry = terms.entry(m).or_insert_with(|| field.zero());
            *entry = &*entry + &c;
            start = k;
        }
        k += 1;
    }
    terms.retain(|_, c| !c.is_zero());
    Ok(ParsedPoly { terms, field })
}

/// Comma-separated generators.
pub fn parse_generators(text: &str, field: Field) -> Result<Vec<ParsedPoly>> {
    text.split(',').map(|g| parse_poly(g, field)).collect()
}

/// The ideal generated by `text` over `field`. With `trunc = None` the
/// truncation is raised from the generator degree until the colength is
/// certified, up to `max_trunc`.
pub fn ideal_from_str(text: &str, field: Field, trunc: Option<usize>, max_trunc: usize) -> Result<NodeIdeal> {
    let gens = parse_generators(text, field)?;
    let degree = gens.iter().map(ParsedPoly::degree).max().unwrap_or(0);
    let build = |n: usize| -> Result<NodeIdeal> {
        let ring = field_ring(field, n);
        let series = gens.iter().map(|g| g.to_series(&ring)).collect::<Result<Vec<_>>>()?;
        NodeIdeal::from_generators(&ring, series)
    };
    if let Some(n) = trunc {
        return build(n);
    }
    let mut n = degree.max(1);
    loop {
        let ideal = build(n)?;
        match ideal.colength() {
            Err(Error::TruncationTooSmall(_)) if n < max_trunc => n = (2 * n).min(max_trunc),
            Err(Error::TruncationTooSmall(_)) => {
                return Err(Error::ResourceCap(format!("colength not certified up to truncation {max_trunc}")))
            }
            Err(e) => return Err(e),
            Ok(_) => return Ok(ideal),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{classify, IdealType};

    #[test]
    fn terms_and_signs() {
        let f = Field::Rational;
        let p = parse_poly(" y + 3x^2 - 1/2 x - x^2 ", f).unwrap();
        assert_eq!(p.terms.len(), 3);
        assert_eq!(p.terms[&Monomial::X(2)], f.from_i64(2));
        assert_eq!(p.terms[&Monomial::X(1)], f.rational(-1, 2).unwrap());
        assert_eq!(p.terms[&Monomial::Y(1)], f.one());
        assert_eq!(parse_poly("2*y^3", f).unwrap().terms[&Monomial::Y(3)], f.from_i64(2));
        assert_eq!(parse_poly("x^0", f).unwrap().terms[&Monomial::One], f.one());
        assert!(parse_poly("x - x", f).unwrap().is_zero());
    }

    #[test]
    fn modular_coefficients() {
        let f = Field::prime(7).unwrap();
        let p = parse_poly("1/2 y + 10 x", f).unwrap();
        assert_eq!(p.terms[&Monomial::Y(1)], f.from_i64(4));
        assert_eq!(p.terms[&Monomial::X(1)], f.from_i64(3));
        assert!(matches!(parse_poly("1/7 x", f), Err(Error::DivisionByZero)));
    }

    #[test]
    fn rejects_malformed() {
        let f = Field::Rational;
        for bad in ["", "x^", "xy", "x*y", "z", "3/", "x^-1", "+", "2 x y"] {
            assert!(parse_poly(bad, f).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn classifies_parsed_ideals() {
        let f7 = Field::prime(7).unwrap();
        let c = ideal_from_str("y + 3x^2", f7, None, 64).unwrap();
        assert_eq!(classify(&c).unwrap(), IdealType::c(3, 1, f7.from_i64(3)).unwrap());
        let q = ideal_from_str("x^2, y^2", Field::Rational, None, 64).unwrap();
        assert_eq!(classify(&q).unwrap(), IdealType::q(3, 2).unwrap());
        let u = ideal_from_str("1 + x", Field::Rational, None, 64).unwrap();
        assert_eq!(u.colength().unwrap(), 0);
        assert!(matches!(ideal_from_str("x^2", Field::Rational, None, 16), Err(Error::ResourceCap(_))));
    }
}
