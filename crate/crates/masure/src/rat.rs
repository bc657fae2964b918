//! Exact rational scalars and small dense vector helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Dense exact vector.
pub type Vector = Vec<Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zeros(d: usize) -> Vector {
    vec![Q::zero(); d]
}

pub fn unit(d: usize, i: usize) -> Vector {
    let mut v = zeros(d);
    v[i] = Q::one();
    v
}

pub fn from_ints(v: &[i64]) -> Vector {
    v.iter().map(|&x| q(x)).collect()
}

/// Parses `"p/q"`, `"p"` or a plain decimal like `"-0.25"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let n: BigInt = a.trim().parse().ok()?;
        let d: BigInt = b.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n, d));
    }
    if let Some((a, b)) = s.split_once('.') {
        if b.is_empty() || !b.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = a.starts_with('-');
        let ip: BigInt = if a == "-" || a.is_empty() { BigInt::zero() } else { a.parse().ok()? };
        let fp: BigInt = b.parse().ok()?;
        let den = num_traits::pow(BigInt::from(10), b.len());
        let mag = ip.abs() * &den + fp;
        let n = if neg { -mag } else { mag };
        return Some(Q::new(n, den));
    }
    let n: BigInt = s.parse().ok()?;
    Some(Q::from_integer(n))
}

/// Renders `"p"` for integers and `"p/q"` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Rounded decimal rendering with `k` fractional digits (half away from zero).
pub fn fmt_decimal(x: &Q, k: usize) -> String {
    let scale = num_traits::pow(BigInt::from(10), k);
    let scaled = x * Q::from_integer(scale.clone());
    let r = scaled.round().to_integer();
    let neg = r.is_negative();
    let mag = r.abs();
    let (ip, fp) = mag.div_rem(&scale);
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    s.push_str(&ip.to_string());
    if k > 0 {
        let f = fp.to_string();
        s.push('.');
        for _ in f.len()..k {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &Q, a: &[Q]) -> Vector {
    a.iter().map(|x| c * x).collect()
}

pub fn neg(a: &[Q]) -> Vector {
    a.iter().map(|x| -x).collect()
}

/// `a + c*b`
pub fn axpy(a: &[Q], c: &Q, b: &[Q]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

pub fn l1(a: &[Q]) -> Q {
    a.iter().fold(Q::zero(), |acc, x| acc + x.abs())
}

pub fn linf(a: &[Q]) -> Q {
    a.iter().map(|x| x.abs()).max().unwrap_or_else(Q::zero)
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Least common multiple of all denominators (1 for an empty slice).
pub fn lcm_denominators(a: &[Q]) -> BigInt {
    a.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Dense matrix-vector product.
pub fn mat_vec(m: &[Vector], v: &[Q]) -> Vector {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn mat_mul(a: &[Vector], b: &[Vector]) -> Vec<Vector> {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Q::zero(), |acc, (x, br)| acc + x * &br[j]))
                .collect()
        })
        .collect()
}

pub fn identity(d: usize) -> Vec<Vector> {
    (0..d).map(|i| unit(d, i)).collect()
}

/// Rank of a rational matrix by exact elimination.
pub fn rank(m: &[Vector]) -> usize {
    let mut a: Vec<Vector> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = &a[i][c] / &piv;
                let pr = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Solves the square system `m x = b`; `None` when singular.
pub fn solve_square(m: &[Vector], b: &[Q]) -> Option<Vector> {
    let n = m.len();
    let mut a: Vec<Vector> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let piv = a[c][c].clone();
        for x in a[c].iter_mut() {
            *x /= &piv;
        }
        let pr = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != c && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// One solution of the underdetermined system `m x = b` (free columns set to zero).
pub fn solve_any(m: &[Vector], b: &[Q]) -> Option<Vector> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vector> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let piv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= &piv;
        }
        let pr = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = zeros(cols);
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "-3", "1/2", "-7/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("4/8").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-0.25").unwrap(), qf(-1, 4));
        assert_eq!(parse_q("-.5").unwrap(), qf(-1, 2));
        assert!(parse_q("1/0").is_none());
        assert!(parse_q("abc").is_none());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(fmt_decimal(&qf(1, 3), 4), "0.3333");
        assert_eq!(fmt_decimal(&qf(-2, 3), 2), "-0.67");
        assert_eq!(fmt_decimal(&q(5), 0), "5");
        assert_eq!(fmt_decimal(&qf(1, 20), 3), "0.050");
    }

    #[test]
    fn rank_and_solve() {
        let m = vec![from_ints(&[2, -2]), from_ints(&[-2, 2])];
        assert_eq!(rank(&m), 1);
        let m2 = vec![from_ints(&[2, -3]), from_ints(&[-3, 2])];
        assert_eq!(rank(&m2), 2);
        let x = solve_square(&m2, &from_ints(&[1, 1])).unwrap();
        assert_eq!(mat_vec(&m2, &x), from_ints(&[1, 1]));
        let under = vec![from_ints(&[2, -2, 1]), from_ints(&[-2, 2, 0])];
        let y = solve_any(&under, &from_ints(&[1, 1])).unwrap();
        assert_eq!(mat_vec(&under, &y), from_ints(&[1, 1]));
        assert!(solve_any(&m, &from_ints(&[1, 1])).is_none());
    }
}
