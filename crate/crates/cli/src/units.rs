//! Angle and range parsing at the command-line boundary.
//!
//! Angles default to degrees. A `rad` or `deg` suffix overrides the unit, and
//! multiples of π (`pi/9`, `2pi/9`, `-pi/4`) are always radians.

use std::f64::consts::PI;

fn number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn pi_multiple(s: &str) -> Result<f64, String> {
    let (head, tail) = s.split_once("pi").expect("caller checked");
    let coeff = match head.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => number(h.trim_end_matches('*'))?,
    };
    let div = match tail.trim() {
        "" => 1.0,
        t => match t.strip_prefix('/') {
            Some(d) => number(d)?,
            None => return Err(format!("`{s}`: expected `pi/<divisor>`")),
        },
    };
    if div == 0.0 {
        return Err(format!("`{s}`: division by zero"));
    }
    Ok(coeff * PI / div)
}

/// Angle in radians.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.contains("pi") {
        return pi_multiple(s);
    }
    if let Some(v) = s.strip_suffix("rad") {
        return number(v);
    }
    let v = s.strip_suffix("deg").or_else(|| s.strip_suffix('°')).unwrap_or(s);
    Ok(number(v)?.to_radians())
}

/// `start:stop:count` (inclusive, evenly spaced), a comma list, or one value.
pub fn parse_angle_list(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [one] => one.split(',').map(parse_angle).collect(),
        [start, stop, count] => {
            let (a, b) = (parse_angle(start)?, parse_angle(stop)?);
            let n: usize = count.trim().parse().map_err(|_| format!("`{count}` is not a point count"))?;
            match n {
                0 => Err(format!("`{s}`: range needs at least one point")),
                1 => Ok(vec![a]),
                _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
            }
        }
        _ => Err(format!("`{s}`: expected start:stop:count")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forms() {
        assert_eq!(parse_angle("180").unwrap(), PI);
        assert_eq!(parse_angle("90deg").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("0.5rad").unwrap(), 0.5);
        assert_eq!(parse_angle("pi/9").unwrap(), PI / 9.0);
        assert_eq!(parse_angle("2pi/9").unwrap(), 2.0 * PI / 9.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -PI / 4.0);
        assert!(parse_angle("pi/0").is_err());
        assert!(parse_angle("ten").is_err());
        assert!(parse_angle("nan").is_err());
    }

    #[test]
    fn ranges() {
        let r = parse_angle_list("10:80:15").unwrap();
        assert_eq!(r.len(), 15);
        assert!((r[1] - 15f64.to_radians()).abs() < 1e-15);
        assert!((r[14] - 80f64.to_radians()).abs() < 1e-15);
        assert_eq!(parse_angle_list("2.5,5,10").unwrap().len(), 3);
        assert!(parse_angle_list("1:2").is_err());
        assert!(parse_angle_list("1:2:0").is_err());
    }
}
