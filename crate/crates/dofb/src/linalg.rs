//! Dense exact linear algebra over a prime field.
//!
//! Everything here operates on row vectors (`Vec<u64>` with entries already
//! reduced modulo the field). Matrices at play are tiny — a handful of rows
//! over a handful of columns — so the implementation favors a fully reduced
//! echelon form over sparsity tricks.

use crate::field::PrimeField;

/// An incrementally built reduced row-echelon basis.
///
/// Stored rows are normalized (pivot entry 1) and fully reduced against each
/// other, so reducing an incoming row is a single pass over the basis.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: PrimeField,
    width: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl Echelon {
    /// Empty basis for rows of the given width.
    pub fn new(field: PrimeField, width: usize) -> Self {
        Echelon {
            field,
            width,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Number of independent rows inserted so far.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the basis and returns the residual.
    ///
    /// # Panics
    /// Panics if `row` has the wrong width.
    pub fn reduce(&self, row: &[u64]) -> Vec<u64> {
        assert_eq!(row.len(), self.width, "row width mismatch");
        let f = self.field;
        let mut out = row.to_vec();
        for (basis_row, &pivot) in self.rows.iter().zip(&self.pivots) {
            let factor = out[pivot];
            if factor != 0 {
                for (o, &b) in out.iter_mut().zip(basis_row) {
                    *o = f.sub(*o, f.mul(factor, b));
                }
            }
        }
        out
    }

    /// True iff `row` lies in the span of the inserted rows.
    pub fn contains(&self, row: &[u64]) -> bool {
        self.reduce(row).iter().all(|&x| x == 0)
    }

    /// Inserts a row; returns `true` if it was independent (rank grew).
    pub fn insert(&mut self, row: &[u64]) -> bool {
        let mut reduced = self.reduce(row);
        let Some(pivot) = reduced.iter().position(|&x| x != 0) else {
            return false;
        };
        let f = self.field;
        let scale = f.inv(reduced[pivot]);
        for x in reduced.iter_mut() {
            *x = f.mul(*x, scale);
        }
        // Back-substitute so existing rows stay fully reduced.
        for existing in self.rows.iter_mut() {
            let factor = existing[pivot];
            if factor != 0 {
                for (e, &n) in existing.iter_mut().zip(&reduced) {
                    *e = f.sub(*e, f.mul(factor, n));
                }
            }
        }
        self.rows.push(reduced);
        self.pivots.push(pivot);
        true
    }
}

/// Rank of the matrix whose rows are `rows`.
pub fn rank(field: PrimeField, rows: &[Vec<u64>]) -> usize {
    let Some(first) = rows.first() else { return 0 };
    let mut ech = Echelon::new(field, first.len());
    for row in rows {
        ech.insert(row);
    }
    ech.rank()
}

/// True iff `row` lies in the row span of `basis`.
pub fn in_span(field: PrimeField, basis: &[Vec<u64>], row: &[u64]) -> bool {
    let mut ech = Echelon::new(field, row.len());
    for b in basis {
        ech.insert(b);
    }
    ech.contains(row)
}

/// Finds coefficients `c` with `Σ c[i]·rows[i] = target`, if any exist.
pub fn solve_combination(field: PrimeField, rows: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    let f = field;
    let width = target.len();
    // Fully reduced echelon rows paired with the coefficient vector that
    // produces each of them from the original `rows`.
    let mut ech: Vec<(Vec<u64>, Vec<u64>, usize)> = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), width, "row width mismatch");
        let mut r = row.clone();
        let mut c = vec![0u64; rows.len()];
        c[i] = 1;
        for (er, ec, pivot) in &ech {
            let factor = r[*pivot];
            if factor != 0 {
                for (x, &b) in r.iter_mut().zip(er) {
                    *x = f.sub(*x, f.mul(factor, b));
                }
                for (x, &b) in c.iter_mut().zip(ec) {
                    *x = f.sub(*x, f.mul(factor, b));
                }
            }
        }
        if let Some(pivot) = r.iter().position(|&x| x != 0) {
            let scale = f.inv(r[pivot]);
            for x in r.iter_mut() {
                *x = f.mul(*x, scale);
            }
            for x in c.iter_mut() {
                *x = f.mul(*x, scale);
            }
            for (er, ec, _) in ech.iter_mut() {
                let factor = er[pivot];
                if factor != 0 {
                    for (x, &b) in er.iter_mut().zip(&r) {
                        *x = f.sub(*x, f.mul(factor, b));
                    }
                    for (x, &b) in ec.iter_mut().zip(&c) {
                        *x = f.sub(*x, f.mul(factor, b));
                    }
                }
            }
            ech.push((r, c, pivot));
        }
    }
    let mut residual = target.to_vec();
    let mut combo = vec![0u64; rows.len()];
    for (er, ec, pivot) in &ech {
        let factor = residual[*pivot];
        if factor != 0 {
            for (x, &b) in residual.iter_mut().zip(er) {
                *x = f.sub(*x, f.mul(factor, b));
            }
            for (x, &b) in combo.iter_mut().zip(ec) {
                *x = f.add(*x, f.mul(factor, b));
            }
        }
    }
    if residual.iter().all(|&x| x == 0) {
        Some(combo)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> PrimeField {
        PrimeField::default()
    }

    #[test]
    fn rank_of_identity_and_singular_matrices() {
        let id = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
        assert_eq!(rank(f(), &id), 3);

        let p = f().modulus();
        // Third row = row0 + row1.
        let singular = vec![vec![1, 2, 3], vec![4, 5, 6], vec![5, 7, 9]];
        assert_eq!(rank(f(), &singular), 2);

        let with_neg = vec![vec![1, 1], vec![p - 1, p - 1]];
        assert_eq!(rank(f(), &with_neg), 1);

        assert_eq!(rank(f(), &[]), 0);
        assert_eq!(rank(f(), &[vec![0, 0, 0]]), 0);
    }

    #[test]
    fn span_membership() {
        let basis = vec![vec![1, 0, 2], vec![0, 1, 3]];
        assert!(in_span(f(), &basis, &[1, 1, 5]));
        assert!(in_span(f(), &basis, &[0, 0, 0]));
        assert!(!in_span(f(), &basis, &[0, 0, 1]));
    }

    #[test]
    fn solve_combination_recovers_coefficients() {
        let field = f();
        let rows = vec![vec![1, 2, 0], vec![0, 1, 1], vec![1, 3, 1]];
        // target = 2·row0 + 5·row1 = [2, 9, 5]
        let target = vec![2, 9, 5];
        let combo = solve_combination(field, &rows, &target).expect("solvable");
        let mut check = vec![0u64; 3];
        for (c, row) in combo.iter().zip(&rows) {
            for (x, &r) in check.iter_mut().zip(row) {
                *x = field.add(*x, field.mul(*c, r));
            }
        }
        assert_eq!(check, target);
    }

    #[test]
    fn solve_combination_detects_infeasibility() {
        let rows = vec![vec![1, 0, 0], vec![0, 1, 0]];
        assert!(solve_combination(f(), &rows, &[0, 0, 7]).is_none());
        // Redundant row sets still solve when the target is in span.
        let rows = vec![vec![1, 1], vec![2, 2]];
        assert!(solve_combination(f(), &rows, &[3, 3]).is_some());
    }

    #[test]
    fn echelon_insert_reports_independence() {
        let mut ech = Echelon::new(f(), 3);
        assert!(ech.insert(&[1, 2, 3]));
        assert!(ech.insert(&[0, 1, 1]));
        assert!(!ech.insert(&[1, 3, 4])); // sum of the first two
        assert_eq!(ech.rank(), 2);
        assert!(ech.contains(&[2, 5, 7]));
        assert!(!ech.contains(&[0, 0, 1]));
    }
}
