//! Parsing of vector and matrix literals given on the command line.

use crown_core::linalg::RMat;

/// `"0.5,0.2"` → `[0.5, 0.2]`.
pub fn vector(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number `{}`: {e}", t.trim()))
        })
        .collect()
}

/// Rows separated by `;`, entries by `,`: `"1,0;0,1"`.
pub fn matrix(s: &str) -> Result<RMat, String> {
    let rows: Vec<Vec<f64>> = s.split(';').map(vector).collect::<Result<_, _>>()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(format!(
            "matrix must be square, got {n} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        ));
    }
    Ok(RMat::from_fn(n, n, |i, j| rows[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(vector("0.5, -0.2").unwrap(), vec![0.5, -0.2]);
        assert!(vector("0.5,x").is_err());
        let m = matrix("1,2;3,4").unwrap();
        assert_eq!(m[(1, 0)], 3.0);
        assert!(matrix("1,2;3").is_err());
    }
}
