//! Small dense subspace routines on top of nalgebra's SVD.

use nalgebra::{DMatrix, DVector};

/// Singular values below this fraction of the largest are zero.
pub const REL_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Subspace {
    /// Orthonormal basis, one vector per column.
    pub basis: DMatrix<f64>,
    /// Some singular value fell within 10x of the rank threshold.
    pub near_singular: bool,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient(&self) -> usize {
        self.basis.nrows()
    }

    pub fn zero(n: usize) -> Self {
        Self {
            basis: DMatrix::zeros(n, 0),
            near_singular: false,
        }
    }
}

fn flag(values: &[f64], threshold: f64) -> bool {
    values.iter().any(|&s| s > threshold / 10.0 && s < threshold * 10.0)
}

/// Column space of `m` (columns are generators).
pub fn span(m: &DMatrix<f64>) -> Subspace {
    let n = m.nrows();
    if m.ncols() == 0 {
        return Subspace::zero(n);
    }
    // Pad to a square-or-wider matrix so that U is complete.
    let cols = m.ncols().max(n);
    let mut padded = DMatrix::zeros(n, cols);
    padded.view_mut((0, 0), (n, m.ncols())).copy_from(m);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Subspace::zero(n);
    }
    let thr = REL_TOL * smax;
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let keep: Vec<usize> = (0..sv.len()).filter(|&i| sv[i] > thr).collect();
    Subspace {
        basis: DMatrix::from_columns(&keep.iter().map(|&i| u.column(i).into_owned()).collect::<Vec<DVector<f64>>>()),
        near_singular: flag(&sv, thr),
    }
}

pub fn rank(m: &DMatrix<f64>) -> (usize, bool) {
    let s = span(m);
    (s.dim(), s.near_singular)
}

/// Orthonormal basis of the orthogonal complement.
pub fn complement(s: &Subspace) -> DMatrix<f64> {
    let n = s.ambient();
    if s.dim() == 0 {
        return DMatrix::identity(n, n);
    }
    let mut padded = DMatrix::zeros(n, n);
    padded.view_mut((0, 0), (n, s.dim())).copy_from(&s.basis);
    let svd = padded.svd(true, false);
    let u = svd.u.expect("requested U");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let cols: Vec<DVector<f64>> = (0..n).filter(|&i| sv[i] <= 0.5).map(|i| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Sum of two subspaces.
pub fn union(a: &Subspace, b: &Subspace) -> Subspace {
    let mut s = span(&concat(&a.basis, &b.basis));
    s.near_singular |= a.near_singular || b.near_singular;
    s
}

fn concat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

/// Intersection as the null space of the stacked complements.
pub fn intersect(a: &Subspace, b: &Subspace) -> Subspace {
    let n = a.ambient();
    let ca = complement(a);
    let cb = complement(b);
    let k = ca.ncols() + cb.ncols();
    let mut near = a.near_singular || b.near_singular;
    if k == 0 {
        return Subspace {
            basis: DMatrix::identity(n, n),
            near_singular: near,
        };
    }
    let rows = k.max(n);
    let mut m = DMatrix::zeros(rows, n);
    m.view_mut((0, 0), (ca.ncols(), n)).copy_from(&ca.transpose());
    m.view_mut((ca.ncols(), 0), (cb.ncols(), n)).copy_from(&cb.transpose());
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    // Rows are orthonormal blocks, so the scale is one.
    near |= flag(&sv, REL_TOL);
    let cols: Vec<DVector<f64>> = (0..n)
        .filter(|&i| sv[i] <= REL_TOL)
        .map(|i| vt.row(i).transpose().into_owned())
        .collect();
    Subspace {
        basis: if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) },
        near_singular: near,
    }
}

/// Rank of the first `rows` coordinates of an orthonormal basis.
pub fn leading_rank(s: &Subspace, rows: usize) -> (usize, bool) {
    if s.dim() == 0 {
        return (0, false);
    }
    let top = s.basis.rows(0, rows).into_owned();
    let mut padded = DMatrix::zeros(rows.max(top.ncols()), top.ncols());
    padded.view_mut((0, 0), (rows, top.ncols())).copy_from(&top);
    let sv: Vec<f64> = padded.singular_values().iter().copied().collect();
    (sv.iter().filter(|&&x| x > REL_TOL).count(), flag(&sv, REL_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(v: &[[f64; 3]]) -> DMatrix<f64> {
        DMatrix::from_fn(3, v.len(), |i, j| v[j][i])
    }

    #[test]
    fn ranks_and_intersections_in_3d() {
        let xy = span(&cols(&[[1.0, 0.0, 0.0], [1.0, 1.0, 0.0]]));
        let yz = span(&cols(&[[0.0, 1.0, 0.0], [0.0, 2.0, 3.0]]));
        assert_eq!(xy.dim(), 2);
        assert_eq!(union(&xy, &yz).dim(), 3);
        let line = intersect(&xy, &yz);
        assert_eq!(line.dim(), 1);
        assert!(line.basis[(0, 0)].abs() < 1e-12 && line.basis[(2, 0)].abs() < 1e-12);
        assert_eq!(intersect(&xy, &xy).dim(), 2);
        assert_eq!(complement(&xy).ncols(), 1);
        assert_eq!(rank(&cols(&[[1.0, 2.0, 3.0], [2.0, 4.0, 6.0]])).0, 1);
        assert_eq!(intersect(&Subspace::zero(3), &xy).dim(), 0);
    }

    #[test]
    fn leading_rank_splits_angular_part() {
        let m = DMatrix::from_fn(6, 2, |i, j| if (j == 0 && i == 0) || (j == 1 && i == 4) { 1.0 } else { 0.0 });
        assert_eq!(leading_rank(&span(&m), 3).0, 1);
    }
}
