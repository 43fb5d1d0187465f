//! `key = value` files with `#` comments, exact rationals, and point literals.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::algebra::GaussianRational;
use crate::closed_form::{make_solution, ClosedFormSolution, HPoint, Pairing};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: {message}")]
    Value { key: String, message: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
}

/// Parsed `key = value` pairs; later duplicates are rejected.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub entries: BTreeMap<String, String>,
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let mut entries = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(ConfigError::Line { line, message: format!("expected `key = value`, got `{body}`") });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
            return Err(ConfigError::Line { line, message: format!("invalid key `{key}`") });
        }
        if entries.insert(key.to_string(), value.to_string()).is_some() {
            return Err(ConfigError::Line { line, message: format!("duplicate key `{key}`") });
        }
    }
    Ok(Config { entries })
}

impl Config {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, ConfigError> {
        self.get(key).ok_or_else(|| ConfigError::Missing(key.to_string()))
    }

    pub fn rational(&self, key: &str) -> Result<BigRational, ConfigError> {
        parse_rational(self.require(key)?).map_err(|message| ConfigError::Value { key: key.into(), message })
    }

    pub fn rational_or_zero(&self, key: &str) -> Result<BigRational, ConfigError> {
        match self.get(key) {
            None => Ok(BigRational::zero()),
            Some(_) => self.rational(key),
        }
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.require(key)?
            .parse()
            .map_err(|_| ConfigError::Value { key: key.into(), message: "expected a non-negative integer".into() })
    }
}

/// `"-3"`, `"1/2"`, `"0.125"`, `"-2.5e-3"`, all exact.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let bad = || format!("`{s}` is not a rational number");
    if let Some((a, b)) = s.split_once('/') {
        let num: BigInt = a.trim().parse().map_err(|_| bad())?;
        let den: BigInt = b.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(format!("`{s}` has a zero denominator"));
        }
        return Ok(BigRational::new(num, den));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], s[k + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    if exp.abs() > 4000 {
        return Err(format!("`{s}` has an exponent out of range"));
    }
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.bytes().chain(frac_part.bytes()).all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let num: BigInt = format!("{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if shift >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Ok(if neg { -r } else { r })
}

/// Solution record: `n`, `mu<k>_re`, `mu<k>_im`, `lambda_re`, `lambda_im` and optional
/// `convention = mu.z | mu.zbar | auto`. Missing real or imaginary parts default to 0.
pub fn parse_solution(config: &Config) -> Result<ClosedFormSolution, ConfigError> {
    let n = config.usize("n")?;
    if !(1..=9).contains(&n) {
        return Err(ConfigError::Value { key: "n".into(), message: format!("n = {n} outside 1..=9") });
    }
    let mut known = vec!["n".to_string(), "lambda_re".into(), "lambda_im".into(), "convention".into()];
    let mut mu = Vec::with_capacity(n);
    for k in 1..=n {
        let (re, im) = (format!("mu{k}_re"), format!("mu{k}_im"));
        mu.push(GaussianRational::new(config.rational_or_zero(&re)?, config.rational_or_zero(&im)?));
        known.push(re);
        known.push(im);
    }
    if let Some(k) = config.entries.keys().find(|k| !known.contains(k) && is_solution_key(k)) {
        return Err(ConfigError::UnknownKey(k.clone()));
    }
    let lambda = GaussianRational::new(config.rational_or_zero("lambda_re")?, config.rational_or_zero("lambda_im")?);
    let pairing = match config.get("convention").unwrap_or("auto") {
        "auto" => crate::closed_form::default_pairing(),
        other => Pairing::parse(other).ok_or_else(|| ConfigError::Value {
            key: "convention".into(),
            message: format!("expected mu.z, mu.zbar or auto, got `{other}`"),
        })?,
    };
    make_solution(n, mu, lambda, pairing).map_err(|e| ConfigError::Value { key: "mu/lambda".into(), message: e.to_string() })
}

fn is_solution_key(k: &str) -> bool {
    k.starts_with("mu") || k.starts_with("lambda")
}

pub fn solution_to_config(sol: &ClosedFormSolution) -> String {
    let mut out = format!("n = {}\n", sol.n);
    for (k, m) in sol.mu.iter().enumerate() {
        out.push_str(&format!("mu{}_re = {}\nmu{}_im = {}\n", k + 1, m.re, k + 1, m.im));
    }
    out.push_str(&format!("lambda_re = {}\nlambda_im = {}\n", sol.lambda.re, sol.lambda.im));
    out.push_str(&format!("convention = {}\n", sol.pairing.name()));
    out
}

/// `"x1=1/2, y1=-1, t=3"`; omitted coordinates are 0.
pub fn parse_point(text: &str, n: usize) -> Result<HPoint, String> {
    let mut p = HPoint::origin(n);
    let mut seen = std::collections::BTreeSet::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected `coord=value`, got `{part}`"))?;
        let (k, v) = (k.trim(), parse_rational(v)?);
        if !seen.insert(k.to_string()) {
            return Err(format!("coordinate `{k}` given twice"));
        }
        if k == "t" {
            p.t = v;
            continue;
        }
        let bad = || format!("unknown coordinate `{k}` for n = {n}");
        let (is_re, idx) = match (k.strip_prefix('x'), k.strip_prefix('y')) {
            (Some(idx), _) => (true, idx),
            (_, Some(idx)) => (false, idx),
            _ => return Err(bad()),
        };
        let idx: usize = idx.parse().map_err(|_| bad())?;
        if idx == 0 || idx > n {
            return Err(bad());
        }
        let z = &mut p.z[idx - 1];
        if is_re {
            z.re = v;
        } else {
            z.im = v;
        }
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-0.125").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("2.5e-1").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("3E2").unwrap(), rat(300, 1));
        for bad in ["", "1/0", "abc", "1.2.3", "-", ".", "1e"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn config_lines() {
        let c = parse_config("# header\nn = 2\n lambda_im=1 # trailing\n\n").unwrap();
        assert_eq!(c.get("n"), Some("2"));
        assert_eq!(c.get("lambda_im"), Some("1"));
        assert!(matches!(parse_config("n 2"), Err(ConfigError::Line { line: 1, .. })));
        assert!(matches!(parse_config("n=1\nn=2"), Err(ConfigError::Line { line: 2, .. })));
    }

    #[test]
    fn solution_round_trip() {
        let c = parse_config("n = 2\nmu1_re = 1/2\nlambda_im = 1\nconvention = mu.z").unwrap();
        let sol = parse_solution(&c).unwrap();
        assert_eq!(sol.big_n, rat(15, 4));
        let again = parse_solution(&parse_config(&solution_to_config(&sol)).unwrap()).unwrap();
        assert_eq!(sol, again);
        assert!(parse_solution(&parse_config("n = 1\nlambda_im = 0").unwrap()).is_err());
        assert!(matches!(
            parse_solution(&parse_config("n = 1\nlambda_im = 1\nmu2_re = 1").unwrap()),
            Err(ConfigError::UnknownKey(_))
        ));
    }

    #[test]
    fn points() {
        let p = parse_point("x1=1/2, y2=-1, t=3", 2).unwrap();
        assert_eq!(p.z[0], GaussianRational::new(rat(1, 2), rat(0, 1)));
        assert_eq!(p.z[1], GaussianRational::new(rat(0, 1), rat(-1, 1)));
        assert_eq!(p.t, rat(3, 1));
        assert!(parse_point("x3=1", 2).is_err());
        assert!(parse_point("t=1,t=2", 1).is_err());
        assert!(parse_point("q1=1", 1).is_err());
    }
}
