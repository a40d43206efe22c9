//! Small helpers around `num_rational::BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a rational number (expected `p` or `p/q`)")]
pub struct RationalParseError(pub String);

/// Builds `n/d` from machine integers.
pub fn rat(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Converts an unsigned integer (e.g. a clause weight) to a rational.
pub fn rat_u128(value: u128) -> BigRational {
    BigRational::from_integer(BigInt::from(value))
}

/// Parses `p` or `p/q` into a reduced rational; rejects zero denominators.
pub fn parse_rational(text: &str) -> Result<BigRational, RationalParseError> {
    let text = text.trim();
    text.parse::<BigRational>()
        .map_err(|_| RationalParseError(text.to_string()))
}

/// Formats a rational as `p/q`, or plain `p` for integers (always reduced).
pub fn format_rational(value: &BigRational) -> String {
    value.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("9").unwrap(), rat(9, 1));
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
        assert_eq!(format_rational(&rat(8, 2)), "4");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("one half").is_err());
    }
}
