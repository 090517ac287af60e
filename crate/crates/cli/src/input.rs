//! Parsing of vectors and schedules given on the command line.

use hardy_core::{EVector, Error, Result};
use num_complex::Complex64;

/// Comma-separated entries, each `re` or `re:im`.
pub fn parse_evector(text: &str) -> Result<EVector> {
    let coords = text
        .split(',')
        .map(|entry| {
            let entry = entry.trim();
            let (re, im) = entry.split_once(':').unwrap_or((entry, "0"));
            let re: f64 = re.trim().parse().map_err(|_| Error::Parse(format!("bad number '{re}'")))?;
            let im: f64 = im.trim().parse().map_err(|_| Error::Parse(format!("bad number '{im}'")))?;
            Ok(Complex64::new(re, im))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EVector::new(coords))
}

/// Pads or rejects so the vector has exactly `dim` coordinates.
pub fn fit_dim(v: EVector, dim: usize) -> Result<EVector> {
    match v.dim() {
        d if d == dim => Ok(v),
        d if d < dim => {
            let mut coords = v.coords;
            coords.resize(dim, Complex64::new(0.0, 0.0));
            Ok(EVector::new(coords))
        }
        d => Err(Error::DimensionMismatch { expected: dim, got: d }),
    }
}

pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad number '{s}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors_parse_with_optional_imaginary_parts() {
        let v = parse_evector("1, 0.5:-2,0").unwrap();
        assert_eq!(v.coords, vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, -2.0), Complex64::new(0.0, 0.0)]);
        assert!(parse_evector("1,x").is_err());
        assert_eq!(fit_dim(parse_evector("1").unwrap(), 3).unwrap().dim(), 3);
        assert!(fit_dim(parse_evector("1,2").unwrap(), 1).is_err());
        assert_eq!(parse_reals("0.1, 1").unwrap(), vec![0.1, 1.0]);
    }
}
