//! Value parsers for command-line flags.

use num_complex::Complex64;

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i` or `-i` without spaces.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let bad = || format!("`{s}` is not a complex literal of the form a+bi");
    if s.is_empty() || s.contains(char::is_whitespace) {
        return Err(bad());
    }
    let z = match s.strip_suffix('i') {
        None => Complex64::new(s.parse::<f64>().map_err(|_| bad())?, 0.0),
        Some(body) => {
            let bytes = body.as_bytes();
            let split = (1..bytes.len())
                .rev()
                .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
            let (re, im) = match split {
                Some(i) => (body[..i].parse::<f64>().map_err(|_| bad())?, &body[i..]),
                None => (0.0, body),
            };
            let im = match im {
                "" | "+" => 1.0,
                "-" => -1.0,
                t => t.parse::<f64>().map_err(|_| bad())?,
            };
            Complex64::new(re, im)
        }
    };
    if z.is_finite() {
        Ok(z)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn finite_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        Ok(_) => Err(format!("`{s}` is not finite")),
        Err(e) => Err(format!("`{s}`: {e}")),
    }
}

/// Positive number or `inf`.
pub fn positive_q(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 => Ok(x),
        Ok(_) => Err(format!("`{s}` must be positive")),
        Err(e) => Err(format!("`{s}`: {e}")),
    }
}

/// Aperture-ratio exponent of the backward recurrence: 1 or 3.
pub fn ratio_exponent(s: &str) -> Result<i32, String> {
    match s {
        "1" => Ok(1),
        "3" => Ok(3),
        _ => Err(format!("`{s}` must be 1 or 3")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_complex("3+0.03i").unwrap(), Complex64::new(3.0, 0.03));
        assert_eq!(parse_complex("-1.5-2i").unwrap(), Complex64::new(-1.5, -2.0));
        assert_eq!(parse_complex("0.9").unwrap(), Complex64::new(0.9, 0.0));
        assert_eq!(parse_complex("2.5i").unwrap(), Complex64::new(0.0, 2.5));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert_eq!(parse_complex("-1e-3-4e-2i").unwrap(), Complex64::new(-1e-3, -0.04));
    }

    #[test]
    fn rejects_malformed() {
        for s in ["", "3 + 2i", "3+2j", "abc", "3+i2", "1+2i+3i", "inf"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
        assert!(finite_f64("nan").is_err());
        assert!(positive_q("0").is_err());
        assert_eq!(positive_q("inf").unwrap(), f64::INFINITY);
    }
}
