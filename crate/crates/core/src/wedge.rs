//! Multi-index combinatorics for the wedge basis of Λ^d.

use nalgebra::DVector;

/// Binomial coefficient, exact for the desk-scale dimensions used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All strictly increasing d-tuples from {0..n-1} in lexicographic order,
/// indexing an orthonormal wedge basis of Λ^d.
#[derive(Clone, Debug)]
pub struct MultiIndexBasis {
    n: usize,
    d: usize,
    tuples: Vec<Vec<usize>>,
}

impl MultiIndexBasis {
    pub fn new(n: usize, d: usize) -> Self {
        assert!(d <= n, "wedge degree exceeds dimension");
        let mut tuples = Vec::with_capacity(binomial(n, d));
        let mut cur: Vec<usize> = (0..d).collect();
        if d == 0 {
            tuples.push(vec![]);
        } else {
            loop {
                tuples.push(cur.clone());
                // Advance to the next increasing tuple.
                let mut i = d;
                loop {
                    if i == 0 {
                        return MultiIndexBasis { n, d, tuples };
                    }
                    i -= 1;
                    if cur[i] != i + n - d {
                        break;
                    }
                }
                cur[i] += 1;
                for j in (i + 1)..d {
                    cur[j] = cur[j - 1] + 1;
                }
            }
        }
        MultiIndexBasis { n, d, tuples }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuple(&self, idx: usize) -> &[usize] {
        &self.tuples[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.tuples.iter().map(|t| t.as_slice())
    }

    /// Position of a strictly increasing tuple (binary search in lex order).
    pub fn index_of(&self, sorted: &[usize]) -> Option<usize> {
        self.tuples
            .binary_search_by(|probe| probe.as_slice().cmp(sorted))
            .ok()
    }

    /// Parity and basis index of an arbitrary tuple of distinct indices:
    /// returns the lexicographic position of its sorted form and the sign of
    /// the sorting permutation. `None` for repeated indices.
    pub fn locate(&self, tuple: &[usize]) -> Option<(usize, f64)> {
        debug_assert_eq!(tuple.len(), self.d);
        let mut buf = [0usize; 16];
        let work = &mut buf[..self.d];
        work.copy_from_slice(tuple);
        let sign = sort_with_parity(work)?;
        self.index_of(work).map(|idx| (idx, sign))
    }

    /// Wedge coordinates of v_1 ∧ … ∧ v_d in this basis: the d×d minors of
    /// the column matrix of the vectors.
    pub fn wedge_coordinates(&self, vectors: &[DVector<f64>]) -> DVector<f64> {
        assert_eq!(vectors.len(), self.d);
        let mut out = DVector::zeros(self.len());
        let mut minor = vec![0.0; self.d * self.d];
        for (pos, rows) in self.tuples.iter().enumerate() {
            for (a, &row) in rows.iter().enumerate() {
                for (b, v) in vectors.iter().enumerate() {
                    minor[a * self.d + b] = v[row];
                }
            }
            out[pos] = det_small(&minor, self.d);
        }
        out
    }
}

/// Sorts in place, returning the permutation sign, or `None` on duplicates.
pub fn sort_with_parity(indices: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    // Insertion sort with inversion counting; tuples are tiny.
    for i in 1..indices.len() {
        let mut j = i;
        while j > 0 && indices[j - 1] > indices[j] {
            indices.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in indices.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(sign)
}

/// Determinant of a small row-major d×d matrix by Gaussian elimination.
fn det_small(m: &[f64], d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => m[0],
        2 => m[0] * m[3] - m[1] * m[2],
        _ => {
            let mut a = m.to_vec();
            let mut det = 1.0;
            for c in 0..d {
                let mut pivot = c;
                for r in (c + 1)..d {
                    if a[r * d + c].abs() > a[pivot * d + c].abs() {
                        pivot = r;
                    }
                }
                if a[pivot * d + c] == 0.0 {
                    return 0.0;
                }
                if pivot != c {
                    for k in 0..d {
                        a.swap(c * d + k, pivot * d + k);
                    }
                    det = -det;
                }
                det *= a[c * d + c];
                for r in (c + 1)..d {
                    let f = a[r * d + c] / a[c * d + c];
                    for k in c..d {
                        a[r * d + k] -= f * a[c * d + k];
                    }
                }
            }
            det
        }
    }
}
