//! Dense Gaussian elimination over any [`Scalar`]. Exact scalars pivot on the
//! first nonzero entry, floats on the largest magnitude.

use crate::scalar::{magnitude, Scalar};

fn pick_pivot<S: Scalar>(m: &[Vec<S>], col: usize, from: usize) -> Option<usize> {
    if S::EXACT {
        (from..m.len()).find(|&r| !m[r][col].is_zero())
    } else {
        let best = (from..m.len()).max_by(|&a, &b| {
            magnitude(&m[a][col]).partial_cmp(&magnitude(&m[b][col])).unwrap()
        })?;
        (magnitude(&m[best][col]) > 0.0).then_some(best)
    }
}

/// Rank of a row-major matrix.
pub fn rank<S: Scalar>(rows: &[Vec<S>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = pick_pivot(&m, c, r) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone() / m[r][c].clone();
            for j in c..cols {
                let t = m[r][j].clone() * f.clone();
                m[i][j] -= &t;
            }
        }
        r += 1;
    }
    r
}

/// Inverse of a square matrix, or `None` when singular.
pub fn invert<S: Scalar>(a: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let n = a.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            assert_eq!(row.len(), n, "matrix is not square");
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { S::one() } else { S::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = pick_pivot(&m, c, c)?;
        m.swap(c, p);
        let inv = S::one() / m[c][c].clone();
        for v in m[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for j in 0..2 * n {
                let t = m[c][j].clone() * f.clone();
                m[i][j] -= &t;
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_vec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter()
        .map(|row| {
            let mut acc = S::zero();
            for (a, b) in row.iter().zip(v) {
                acc += &(a.clone() * b.clone());
            }
            acc
        })
        .collect()
}

/// Incrementally maintained row-echelon basis: answers "does this vector
/// enlarge the span?" without recomputing from scratch.
#[derive(Clone, Debug)]
pub struct Echelon<S: Scalar> {
    dim: usize,
    rows: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> Echelon<S> {
    pub fn new(dim: usize) -> Self {
        Echelon { dim, rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn reduce(&self, v: &[S]) -> Vec<S> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if v[*p].is_zero() {
                continue;
            }
            let f = v[*p].clone() / row[*p].clone();
            for j in 0..self.dim {
                let t = row[j].clone() * f.clone();
                v[j] -= &t;
            }
        }
        v
    }

    /// Adds `v` if it is independent of the stored vectors; returns whether it was.
    pub fn insert(&mut self, v: &[S]) -> bool {
        assert_eq!(v.len(), self.dim);
        let r = self.reduce(v);
        match (0..self.dim).find(|&j| !r[j].is_zero()) {
            Some(p) => {
                self.rows.push((p, r));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &[S]) -> bool {
        self.reduce(v).iter().all(|x| x.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: &[&[i64]]) -> Vec<Vec<Rational>> {
        v.iter().map(|r| r.iter().map(|&x| Rational::from_i64(x)).collect()).collect()
    }

    #[test]
    fn rank_and_inverse() {
        let m = q(&[&[1, 2], &[2, 4]]);
        assert_eq!(rank(&m), 1);
        assert!(invert(&m).is_none());
        let a = q(&[&[0, 1, 0], &[2, 0, 1], &[1, 1, 1]]);
        assert_eq!(rank(&a), 3);
        let inv = invert(&a).unwrap();
        for (i, row) in a.iter().enumerate() {
            for j in 0..3 {
                let col: Vec<Rational> = inv.iter().map(|r| r[j].clone()).collect();
                let dot = mat_vec(&[row.clone()], &col)[0].clone();
                assert_eq!(dot, Rational::from_i64((i == j) as i64));
            }
        }
    }

    #[test]
    fn float_inverse() {
        let a = vec![vec![1e-3, 1.0], vec![1.0, 1.0]];
        let inv = invert(&a).unwrap();
        let x = mat_vec(&inv, &[1.0, 2.0]);
        let back = mat_vec(&a, &x);
        assert!((back[0] - 1.0).abs() < 1e-12 && (back[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn echelon_span() {
        let mut e = Echelon::<Rational>::new(3);
        let v = q(&[&[1, 1, 0], &[0, 1, 1], &[1, 2, 1], &[0, 0, 1]]);
        assert!(e.insert(&v[0]));
        assert!(e.insert(&v[1]));
        assert!(!e.insert(&v[2]));
        assert!(e.contains(&v[2]));
        assert!(e.insert(&v[3]));
        assert_eq!(e.rank(), 3);
    }
}
