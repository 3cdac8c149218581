use crate::error::{Error, Result};

/// Richardson extrapolation of `values` computed at strictly decreasing
/// `steps`, assuming an error expansion in powers `step^order`,
/// `step^{2·order}`, …
///
/// Returns the last diagonal entry of the table and the difference to the
/// previous one as error estimate (infinite for a single value).
pub fn richardson(values: &[f64], steps: &[f64], order: u32) -> Result<(f64, f64)> {
    if values.len() != steps.len() {
        return Err(Error::InvalidParameter(format!(
            "richardson: {} values but {} steps",
            values.len(),
            steps.len()
        )));
    }
    if values.is_empty() {
        return Err(Error::InvalidParameter("richardson: no values".into()));
    }
    if steps.windows(2).any(|w| !(w[1] < w[0])) || steps.iter().any(|h| *h <= 0.0) {
        return Err(Error::InvalidParameter(
            "richardson: steps must be positive and strictly decreasing".into(),
        ));
    }
    let n = values.len();
    if n == 1 {
        return Ok((values[0], f64::INFINITY));
    }
    let mut table = vec![values.to_vec()];
    for j in 1..n {
        let prev = &table[j - 1];
        let p = order as i32;
        let row: Vec<f64> = (j..n)
            .map(|i| {
                let a = prev[i - j];
                let b = prev[i - j + 1];
                let ratio = (steps[i - j] / steps[i]).powi(p);
                b + (b - a) / (ratio - 1.0)
            })
            .collect();
        table.push(row);
    }
    let limit = table[n - 1][0];
    let before = *table[n - 2].last().unwrap();
    Ok((limit, (limit - before).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_error_removed() {
        let hs = [1.0, 0.5, 0.25];
        let vs: Vec<f64> = hs.iter().map(|h| 3.0 + h * h).collect();
        let (l, _) = richardson(&vs, &hs, 2).unwrap();
        assert!((l - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_levels_removed() {
        let hs: [f64; 3] = [0.1, 0.05, 0.025];
        let vs: Vec<f64> = hs.iter().map(|h| 1.0 + 2.0 * h * h + h.powi(4)).collect();
        let (l, e) = richardson(&vs, &hs, 2).unwrap();
        assert!((l - 1.0).abs() < 1e-8);
        assert!(e < 1e-4);
    }

    #[test]
    fn single_value() {
        let (l, e) = richardson(&[4.2], &[0.1], 2).unwrap();
        assert_eq!(l, 4.2);
        assert!(e.is_infinite());
    }

    #[test]
    fn length_mismatch() {
        assert!(richardson(&[1.0, 2.0], &[0.1], 2).is_err());
        assert!(richardson(&[1.0, 2.0], &[0.1, 0.2], 2).is_err());
    }
}
