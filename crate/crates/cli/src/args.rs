//! Parsers for the value syntaxes accepted on the command line.

use gaplab::Error;

/// The line spacing as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    /// `sqrt(n-1)`
    SqrtNMinus1,
    /// `sqrt(n/2-1)`
    SqrtHalf,
    Value(f64),
}

impl Spacing {
    pub fn resolve(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Spacing::SqrtNMinus1 => (n - 1.0).sqrt(),
            Spacing::SqrtHalf => (n / 2.0 - 1.0).sqrt(),
            Spacing::Value(v) => v,
        }
    }
}

pub fn parse_spacing(s: &str) -> Result<Spacing, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    match compact.as_str() {
        "sqrt(n-1)" => Ok(Spacing::SqrtNMinus1),
        "sqrt(n/2-1)" => Ok(Spacing::SqrtHalf),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(Spacing::Value)
            .ok_or_else(|| format!("expected a number, `sqrt(n-1)` or `sqrt(n/2-1)`, got `{s}`")),
    }
}

/// A list of instance sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NValues(pub Vec<usize>);

/// `a:b:step`, `a:b` (step 1) or a comma-separated list. A range with
/// `a > b` is empty.
pub fn parse_n_values(s: &str) -> Result<NValues, String> {
    parse_n_list(s).map(NValues)
}

fn parse_n_list(s: &str) -> Result<Vec<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad integer `{t}` in `{s}`"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (lo, hi, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1),
            [a, b, c] => (num(a)?, num(b)?, num(c)?),
            _ => return Err(format!("expected a:b or a:b:step, got `{s}`")),
        };
        if step == 0 {
            return Err("range step must be positive".into());
        }
        return Ok((lo..=hi).step_by(step).collect());
    }
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(num).collect()
}

pub fn parse_tolerance(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad tolerance `{s}`"))?;
    if v > 0.0 && v < 1e-2 {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in (0, 1e-2), got {s}"))
    }
}

pub fn parse_cap(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(c) if c > 0 => Ok(c),
        _ => Err(format!("cap must be a positive integer, got `{s}`")),
    }
}

pub fn core_parse<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_forms() {
        assert_eq!(parse_spacing("sqrt(n-1)").unwrap(), Spacing::SqrtNMinus1);
        assert_eq!(parse_spacing("sqrt( n/2 - 1 )").unwrap(), Spacing::SqrtHalf);
        assert_eq!(parse_spacing("6.5").unwrap(), Spacing::Value(6.5));
        assert!(parse_spacing("sqrt(n)").is_err());
        assert!(parse_spacing("nan").is_err());
        assert_eq!(Spacing::SqrtNMinus1.resolve(18), 17f64.sqrt());
        assert_eq!(Spacing::SqrtHalf.resolve(34), 4.0);
    }

    #[test]
    fn n_values() {
        assert_eq!(parse_n_list("18:24:2").unwrap(), vec![18, 20, 22, 24]);
        assert_eq!(parse_n_list("3:5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_n_list("20:18:2").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_n_list("18, 100,1000").unwrap(), vec![18, 100, 1000]);
        assert!(parse_n_list("1:2:0").is_err());
        assert!(parse_n_list("1:2:3:4").is_err());
        assert!(parse_n_list("x").is_err());
    }

    #[test]
    fn tolerances_and_caps() {
        assert_eq!(parse_tolerance("1e-6").unwrap(), 1e-6);
        assert!(parse_tolerance("0").is_err());
        assert!(parse_tolerance("0.5").is_err());
        assert!(parse_cap("0").is_err());
        assert_eq!(parse_cap("12").unwrap(), 12);
    }
}
