//! Number formatting and CSV files.

use std::io::{self, Write};
use std::path::Path;

use tempfile::NamedTempFile;

/// 17 significant digits in the style of C's `%.17g`: plain notation for
/// decimal exponents in `[-4, 17)`, scientific otherwise, trailing zeros
/// dropped. Independent of locale and round-trip safe.
pub fn fmt17(v: f64) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0" } else { "0" }.into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    if (-4..17).contains(&exp) {
        let body = if exp < 0 {
            format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                format!("{digits}{}", "0".repeat(int_len - digits.len()))
            } else {
                format!("{}.{}", &digits[..int_len], &digits[int_len..])
            }
        };
        format!("{sign}{body}")
    } else {
        let (head, tail) = digits.split_at(1);
        let frac = if tail.is_empty() {
            String::new()
        } else {
            format!(".{tail}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{head}{frac}e{esign}{:02}", exp.abs())
    }
}

/// Comma-separated row of [`fmt17`] values.
pub fn csv_row(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| fmt17(v))
        .collect::<Vec<_>>()
        .join(",")
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so a failed write leaves nothing behind.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// `x, y_approx[, y_ref, abs_err]` rows on `points` uniform samples of
/// `[x0, x1]`.
pub fn grid_csv(
    domain: (f64, f64),
    points: usize,
    approx: impl Fn(f64) -> f64,
    reference: Option<(&str, &dyn Fn(f64) -> f64)>,
) -> String {
    let (x0, x1) = domain;
    let mut out = String::from("x,y_approx");
    if let Some((name, _)) = reference {
        out.push_str(&format!(",{name},abs_err"));
    }
    out.push('\n');
    for i in 0..points {
        let x = x0 + (x1 - x0) * (i as f64 / (points - 1) as f64);
        let y = approx(x);
        let row = match reference {
            Some((_, r)) => {
                let e = r(x);
                csv_row(&[x, y, e, (y - e).abs()])
            }
            None => csv_row(&[x, y]),
        };
        out.push_str(&row);
        out.push('\n');
    }
    out
}
