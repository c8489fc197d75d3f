//! Text mini-language for rational families and colorings, shared by the
//! command-line front end and the test harness.
//!
//! Family forms:
//! `moebius:a=A,b=B,c=C,d=D,l=L` (`l` optional, default 1), `pythag-hyp`,
//! `pythag-leg`, `linear:a=A,b=B`, `poly:coeffs=c0,c1,..`, `geom:p=P,q=Q`,
//! `fourforms:l1,l2,l3,l4`.
//!
//! Coloring forms:
//! `rado3`, `constant`, `padic:p=P,u=U`, `val-parity:p=P`,
//! `padic-power:p=P,u=U,l=L`.
//!
//! Errors carry the byte offset of the offending token so callers can point
//! at the problem. Parsing never panics on any input.

use crate::colorings::{
    padic_power_coloring, padic_residue_coloring, rado3_coloring, valuation_parity_coloring,
    Coloring,
};
use crate::poly::IntPoly;
use crate::recsets::RatFamily;
use std::fmt;

/// Longest accepted descriptor; inputs beyond this are rejected up front.
pub const MAX_DESCRIPTOR_LEN: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescriptorError {
    /// Byte offset into the descriptor where the problem was detected.
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for DescriptorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "descriptor error at byte {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for DescriptorError {}

fn err<T>(offset: usize, message: impl Into<String>) -> Result<T, DescriptorError> {
    Err(DescriptorError { offset, message: message.into() })
}

/// Comma-separated pieces of `text`, each with its byte offset relative to
/// `base`.
fn split_list(text: &str, base: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = base;
    for piece in text.split(',') {
        out.push((offset, piece));
        offset += piece.len() + 1;
    }
    out
}

fn parse_int<T: std::str::FromStr>(
    token: &str,
    offset: usize,
    what: &str,
) -> Result<T, DescriptorError> {
    token
        .parse::<T>()
        .map_err(|_| DescriptorError { offset, message: format!("expected {what}, got {token:?}") })
}

/// Key-value field list: `a=1,b=-2,...`. Keys must come from `allowed`, not
/// repeat, and every returned pair keeps the offset of its value token.
fn parse_fields<'a>(
    tail: &'a str,
    base: usize,
    allowed: &[&str],
) -> Result<Vec<(&'a str, usize, &'a str)>, DescriptorError> {
    let mut seen: Vec<&str> = Vec::new();
    let mut out = Vec::new();
    for (offset, piece) in split_list(tail, base) {
        let Some((key, value)) = piece.split_once('=') else {
            return err(offset, format!("expected key=value, got {piece:?}"));
        };
        if !allowed.contains(&key) {
            return err(offset, format!("unknown field {key:?} (allowed: {})", allowed.join(", ")));
        }
        if seen.contains(&key) {
            return err(offset, format!("duplicate field {key:?}"));
        }
        seen.push(key);
        out.push((key, offset + key.len() + 1, value));
    }
    Ok(out)
}

fn lookup<'a>(
    fields: &[(&str, usize, &'a str)],
    key: &str,
    head_end: usize,
) -> Result<(usize, &'a str), DescriptorError> {
    fields
        .iter()
        .find(|(k, _, _)| *k == key)
        .map(|&(_, off, v)| (off, v))
        .ok_or_else(|| DescriptorError {
            offset: head_end,
            message: format!("missing required field {key:?}"),
        })
}

fn check_len(text: &str) -> Result<(), DescriptorError> {
    if text.len() > MAX_DESCRIPTOR_LEN {
        return err(MAX_DESCRIPTOR_LEN, "descriptor too long");
    }
    Ok(())
}

/// Head (form name) and the tail after the first `:`, if any.
fn split_head(text: &str) -> (&str, Option<(usize, &str)>) {
    match text.split_once(':') {
        Some((head, tail)) => (head, Some((head.len() + 1, tail))),
        None => (text, None),
    }
}

fn no_tail(form: &str, tail: Option<(usize, &str)>) -> Result<(), DescriptorError> {
    match tail {
        None => Ok(()),
        Some((offset, _)) => err(offset, format!("{form} takes no parameters")),
    }
}

/// Parses a family descriptor.
pub fn parse_family(input: &str) -> Result<RatFamily, DescriptorError> {
    check_len(input)?;
    let text = input.trim();
    let lead = input.len() - input.trim_start().len();
    let (head, tail) = split_head(text);
    let head_end = lead + head.len();
    let family = match head {
        "pythag-hyp" => {
            no_tail(head, tail)?;
            return Ok(RatFamily::PythagHyp);
        }
        "pythag-leg" => {
            no_tail(head, tail)?;
            return Ok(RatFamily::PythagLeg);
        }
        "moebius" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "moebius needs fields a, b, c, d (and optional l)".into(),
            })?;
            let fields = parse_fields(body, lead + base, &["a", "b", "c", "d", "l"])?;
            let (ao, av) = lookup(&fields, "a", head_end)?;
            let (bo, bv) = lookup(&fields, "b", head_end)?;
            let (co, cv) = lookup(&fields, "c", head_end)?;
            let (do_, dv) = lookup(&fields, "d", head_end)?;
            let a = parse_int::<u64>(av, ao, "a positive integer")?;
            let b = parse_int::<i64>(bv, bo, "an integer")?;
            let c = parse_int::<u64>(cv, co, "a positive integer")?;
            let d = parse_int::<i64>(dv, do_, "an integer")?;
            let l = match fields.iter().find(|(k, _, _)| *k == "l") {
                Some(&(_, lo, lv)) => parse_int::<u32>(lv, lo, "a positive integer")?,
                None => 1,
            };
            RatFamily::moebius(a, b, c, d, l)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })?
        }
        "linear" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "linear needs fields a, b".into(),
            })?;
            let fields = parse_fields(body, lead + base, &["a", "b"])?;
            let (ao, av) = lookup(&fields, "a", head_end)?;
            let (bo, bv) = lookup(&fields, "b", head_end)?;
            let a = parse_int::<u64>(av, ao, "a positive integer")?;
            let b = parse_int::<u64>(bv, bo, "a nonnegative integer")?;
            RatFamily::linear(a, b)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })?
        }
        "geom" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "geom needs fields p, q".into(),
            })?;
            let fields = parse_fields(body, lead + base, &["p", "q"])?;
            let (po, pv) = lookup(&fields, "p", head_end)?;
            let (qo, qv) = lookup(&fields, "q", head_end)?;
            let p = parse_int::<u64>(pv, po, "a positive integer")?;
            let q = parse_int::<u64>(qv, qo, "a positive integer")?;
            RatFamily::geometric(p, q)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })?
        }
        "poly" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "poly needs coeffs=c0,c1,..".into(),
            })?;
            let Some(list) = body.strip_prefix("coeffs=") else {
                return err(lead + base, "poly needs coeffs=c0,c1,..");
            };
            let list_base = lead + base + "coeffs=".len();
            let mut coeffs = Vec::new();
            for (offset, piece) in split_list(list, list_base) {
                coeffs.push(parse_int::<i64>(piece, offset, "an integer coefficient")?);
            }
            if coeffs.iter().all(|&c| c == 0) {
                return err(list_base, "polynomial must be nonzero");
            }
            RatFamily::PolyImage { poly: IntPoly::new(coeffs) }
        }
        "fourforms" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "fourforms needs four integers l1,l2,l3,l4".into(),
            })?;
            let pieces = split_list(body, lead + base);
            if pieces.len() != 4 {
                return err(lead + base, format!("expected 4 coefficients, got {}", pieces.len()));
            }
            let mut l = [0i64; 4];
            for (slot, &(offset, piece)) in l.iter_mut().zip(pieces.iter()) {
                *slot = parse_int::<i64>(piece, offset, "an integer")?;
            }
            RatFamily::four_forms(l)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })?
        }
        "" => return err(lead, "empty descriptor"),
        other => {
            return err(
                lead,
                format!(
                    "unknown family form {other:?} (expected moebius, pythag-hyp, pythag-leg, \
                     linear, poly, geom, or fourforms)"
                ),
            );
        }
    };
    Ok(family)
}

/// Parses a coloring descriptor.
pub fn parse_coloring(input: &str) -> Result<Coloring, DescriptorError> {
    check_len(input)?;
    let text = input.trim();
    let lead = input.len() - input.trim_start().len();
    let (head, tail) = split_head(text);
    let head_end = lead + head.len();
    match head {
        "rado3" => {
            no_tail(head, tail)?;
            Ok(rado3_coloring())
        }
        "constant" => {
            no_tail(head, tail)?;
            Ok(Coloring::Constant)
        }
        "padic" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "padic needs fields p, u".into(),
            })?;
            let fields = parse_fields(body, lead + base, &["p", "u"])?;
            let (po, pv) = lookup(&fields, "p", head_end)?;
            let (uo, uv) = lookup(&fields, "u", head_end)?;
            let p = parse_int::<u64>(pv, po, "a prime")?;
            let u = parse_int::<u32>(uv, uo, "a positive exponent")?;
            padic_residue_coloring(p, u)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })
        }
        "val-parity" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "val-parity needs field p".into(),
            })?;
            let fields = parse_fields(body, lead + base, &["p"])?;
            let (po, pv) = lookup(&fields, "p", head_end)?;
            let p = parse_int::<u64>(pv, po, "a prime")?;
            valuation_parity_coloring(p)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })
        }
        "padic-power" => {
            let (base, body) = tail.ok_or_else(|| DescriptorError {
                offset: head_end,
                message: "padic-power needs fields p, u, l".into(),
            })?;
            let fields = parse_fields(body, lead + base, &["p", "u", "l"])?;
            let (po, pv) = lookup(&fields, "p", head_end)?;
            let (uo, uv) = lookup(&fields, "u", head_end)?;
            let (lo, lv) = lookup(&fields, "l", head_end)?;
            let p = parse_int::<u64>(pv, po, "a prime")?;
            let u = parse_int::<u32>(uv, uo, "a positive exponent")?;
            let l = parse_int::<u32>(lv, lo, "a positive power")?;
            padic_power_coloring(p, u, l)
                .map_err(|e| DescriptorError { offset: head_end, message: e.to_string() })
        }
        "" => err(lead, "empty descriptor"),
        other => err(
            lead,
            format!(
                "unknown coloring form {other:?} (expected rado3, constant, padic, val-parity, \
                 or padic-power)"
            ),
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn family_forms_parse() {
        assert_eq!(
            parse_family("moebius:a=2,b=1,c=3,d=1,l=1").unwrap(),
            RatFamily::MoebiusPower { a: 2, b: 1, c: 3, d: 1, l: 1 }
        );
        // l defaults to 1 and fields may come in any order.
        assert_eq!(
            parse_family("moebius:d=0,c=1,b=1,a=1").unwrap(),
            RatFamily::MoebiusPower { a: 1, b: 1, c: 1, d: 0, l: 1 }
        );
        assert_eq!(parse_family("pythag-hyp").unwrap(), RatFamily::PythagHyp);
        assert_eq!(parse_family(" pythag-leg ").unwrap(), RatFamily::PythagLeg);
        assert_eq!(
            parse_family("linear:a=4,b=3").unwrap(),
            RatFamily::LinearImage { a: 4, b: 3 }
        );
        assert_eq!(
            parse_family("poly:coeffs=0,0,2").unwrap(),
            RatFamily::PolyImage { poly: IntPoly::new(vec![0, 0, 2]) }
        );
        assert_eq!(
            parse_family("geom:p=3,q=2").unwrap(),
            RatFamily::GeometricPowers { p: 3, q: 2 }
        );
        assert_eq!(
            parse_family("fourforms:1,2,3,4").unwrap(),
            RatFamily::FourLinearForms { l: [1, 2, 3, 4] }
        );
    }

    #[test]
    fn coloring_forms_parse() {
        assert_eq!(parse_coloring("rado3").unwrap(), Coloring::Rado3);
        assert_eq!(parse_coloring("constant").unwrap(), Coloring::Constant);
        assert_eq!(
            parse_coloring("padic:p=2,u=2").unwrap(),
            Coloring::PadicResidue { p: 2, u: 2, modulus: 4 }
        );
        assert_eq!(
            parse_coloring("val-parity:p=3").unwrap(),
            Coloring::ValuationParity { p: 3 }
        );
        match parse_coloring("padic-power:p=2,u=1,l=2").unwrap() {
            Coloring::PowerLift { inner, l } => {
                assert_eq!(*inner, Coloring::PadicResidue { p: 2, u: 1, modulus: 2 });
                assert_eq!(l, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_family("moebius:a=2,b=x,c=3,d=1").unwrap_err();
        assert_eq!(e.offset, 14); // the 'x'
        assert!(e.message.contains("expected an integer"));

        let e = parse_family("moebius:a=2,b=1,zz=3").unwrap_err();
        assert_eq!(e.offset, 16);
        assert!(e.message.contains("unknown field"));

        let e = parse_family("moebius:a=2,b=1,b=2,c=1,d=1").unwrap_err();
        assert!(e.message.contains("duplicate"));

        let e = parse_family("moebius:a=2,b=1,c=3").unwrap_err();
        assert!(e.message.contains("missing required field \"d\""));

        let e = parse_family("nonsense:a=1").unwrap_err();
        assert_eq!(e.offset, 0);

        let e = parse_family("fourforms:1,2,3").unwrap_err();
        assert!(e.message.contains("expected 4"));

        let e = parse_family("pythag-hyp:oops").unwrap_err();
        assert_eq!(e.offset, 11);

        // Constructor-level validation surfaces as a descriptor error.
        assert!(parse_family("moebius:a=0,b=1,c=1,d=1").is_err());
        assert!(parse_family("geom:p=4,q=2").is_err());
        assert!(parse_family("fourforms:1,1,2,3").is_err());
        assert!(parse_family("poly:coeffs=0,0").is_err());
        assert!(parse_coloring("padic:p=4,u=1").is_err());
        assert!(parse_coloring("padic:p=2,u=0").is_err());
        assert!(parse_coloring("blue").is_err());
        assert!(parse_family(&"x".repeat(MAX_DESCRIPTOR_LEN + 1)).is_err());
    }

    proptest! {
        #[test]
        fn family_parser_never_panics(s in ".{0,200}") {
            let _ = parse_family(&s);
        }

        #[test]
        fn coloring_parser_never_panics(s in ".{0,200}") {
            let _ = parse_coloring(&s);
        }

        #[test]
        fn moebius_roundtrip(a in 1u64..50, b in -50i64..50, c in 1u64..50, d in -50i64..50,
                             l in 1u32..4) {
            prop_assume!(a as i64 + b >= 1 && c as i64 + d >= 1);
            let text = format!("moebius:a={a},b={b},c={c},d={d},l={l}");
            let parsed = parse_family(&text).unwrap();
            prop_assert_eq!(parsed, RatFamily::MoebiusPower { a, b, c, d, l });
        }
    }
}
