//! Sparse LU factorization of a simplex basis with partial pivoting,
//! left-looking over columns in a static fill-reducing order.

/// LU factors of a basis matrix.
///
/// Columns are processed in an order chosen at factorization time; `ord[k]`
/// is the basis position handled at stage `k` and `pivot_row[k]` the
/// original row chosen as its pivot. `ftran`/`btran` operate on dense
/// vectors indexed by basis position (input `b` indexed by original row for
/// `ftran`, output by original row for `btran`).
pub struct LuFactors {
    m: usize,
    ord: Vec<usize>,
    pivot_row: Vec<usize>,
    stage_of_row: Vec<usize>,
    // Column k of L: entries (original row, multiplier), rows pivoted later.
    l_cols: Vec<Vec<(usize, f64)>>,
    // Column k of U: off-diagonal entries (stage, value) with stage < k.
    u_cols: Vec<Vec<(usize, f64)>>,
    u_diag: Vec<f64>,
}

#[derive(Debug)]
pub struct SingularBasis {
    pub stage: usize,
}

const PIVOT_EPS: f64 = 1e-11;

impl LuFactors {
    /// Factor the basis whose `k`-th column is given by `col(k)`.
    pub fn factor(
        m: usize,
        col: impl Fn(usize) -> (Vec<usize>, Vec<f64>),
    ) -> Result<LuFactors, SingularBasis> {
        let cols: Vec<(Vec<usize>, Vec<f64>)> = (0..m).map(&col).collect();
        let mut ord: Vec<usize> = (0..m).collect();
        ord.sort_by_key(|&j| (cols[j].0.len(), j));

        let mut lu = LuFactors {
            m,
            ord: Vec::with_capacity(m),
            pivot_row: Vec::with_capacity(m),
            stage_of_row: vec![usize::MAX; m],
            l_cols: Vec::with_capacity(m),
            u_cols: Vec::with_capacity(m),
            u_diag: Vec::with_capacity(m),
        };

        let mut work = vec![0.0f64; m];
        let mut in_work = vec![false; m];
        let mut touched: Vec<usize> = Vec::with_capacity(64);
        let mut reach: Vec<usize> = Vec::with_capacity(64);
        let mut on_stack = vec![false; m];
        let mut dfs: Vec<(usize, usize)> = Vec::new();

        for k in 0..m {
            let j = ord[k];
            let (rows, vals) = &cols[j];
            for (&r, &v) in rows.iter().zip(vals) {
                work[r] = v;
                if !in_work[r] {
                    in_work[r] = true;
                    touched.push(r);
                }
            }
            // Reachable earlier stages, in dependency order.
            reach.clear();
            for &r in rows.iter() {
                let s = lu.stage_of_row[r];
                if s != usize::MAX && !on_stack[s] {
                    Self::dfs_reach(&lu, s, &mut on_stack, &mut dfs, &mut reach);
                }
            }
            reach.sort_unstable();
            for &s in &reach {
                on_stack[s] = false;
                let pr = lu.pivot_row[s];
                let xv = work[pr];
                if xv == 0.0 {
                    continue;
                }
                for &(r, l) in &lu.l_cols[s] {
                    if !in_work[r] {
                        in_work[r] = true;
                        touched.push(r);
                    }
                    work[r] -= l * xv;
                }
            }

            // Pivot: the largest unassigned entry.
            let mut best = 0.0f64;
            let mut best_row = usize::MAX;
            for &r in &touched {
                if lu.stage_of_row[r] == usize::MAX {
                    let a = work[r].abs();
                    if a > best || (a == best && best_row != usize::MAX && r < best_row && a > 0.0)
                    {
                        best = a;
                        best_row = r;
                    }
                }
            }
            if best <= PIVOT_EPS {
                for &r in &touched {
                    work[r] = 0.0;
                    in_work[r] = false;
                }
                touched.clear();
                return Err(SingularBasis { stage: k });
            }
            let piv = work[best_row];

            let mut ucol = Vec::new();
            let mut lcol = Vec::new();
            for &r in &touched {
                let v = work[r];
                work[r] = 0.0;
                in_work[r] = false;
                if v == 0.0 {
                    continue;
                }
                let s = lu.stage_of_row[r];
                if s != usize::MAX {
                    ucol.push((s, v));
                } else if r != best_row {
                    let l = v / piv;
                    if l != 0.0 {
                        lcol.push((r, l));
                    }
                }
            }
            touched.clear();
            ucol.sort_unstable_by_key(|&(s, _)| s);
            lcol.sort_unstable_by_key(|&(r, _)| r);

            lu.stage_of_row[best_row] = k;
            lu.ord.push(j);
            lu.pivot_row.push(best_row);
            lu.u_cols.push(ucol);
            lu.l_cols.push(lcol);
            lu.u_diag.push(piv);
        }
        Ok(lu)
    }

    fn dfs_reach(
        lu: &LuFactors,
        start: usize,
        on_stack: &mut [bool],
        dfs: &mut Vec<(usize, usize)>,
        reach: &mut Vec<usize>,
    ) {
        dfs.push((start, 0));
        on_stack[start] = true;
        while let Some(&mut (s, ref mut next)) = dfs.last_mut() {
            let children = &lu.l_cols[s];
            let mut advanced = false;
            while *next < children.len() {
                let r = children[*next].0;
                *next += 1;
                let cs = lu.stage_of_row[r];
                if cs != usize::MAX && !on_stack[cs] {
                    on_stack[cs] = true;
                    dfs.push((cs, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                reach.push(s);
                dfs.pop();
            }
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// Solve `B x = b`. `b` is indexed by original row; the result is
    /// indexed by basis position.
    pub fn ftran(&self, b: &mut Vec<f64>) {
        let m = self.m;
        debug_assert_eq!(b.len(), m);
        // L z = b, z in stage order, accumulated in place over original rows.
        let mut z = vec![0.0; m];
        for s in 0..m {
            let v = b[self.pivot_row[s]];
            z[s] = v;
            if v != 0.0 {
                for &(r, l) in &self.l_cols[s] {
                    b[r] -= l * v;
                }
            }
        }
        // U y = z, backward.
        for k in (0..m).rev() {
            let y = z[k] / self.u_diag[k];
            z[k] = y;
            if y != 0.0 {
                for &(s, u) in &self.u_cols[k] {
                    z[s] -= u * y;
                }
            }
        }
        // Scatter stage values to basis positions.
        for r in b.iter_mut() {
            *r = 0.0;
        }
        for k in 0..m {
            b[self.ord[k]] = z[k];
        }
    }

    /// Solve `B^T y = c`. `c` is indexed by basis position; the result is
    /// indexed by original row.
    pub fn btran(&self, c: &mut Vec<f64>) {
        let m = self.m;
        debug_assert_eq!(c.len(), m);
        let mut g = vec![0.0; m];
        for k in 0..m {
            g[k] = c[self.ord[k]];
        }
        // U^T h = g, forward.
        for k in 0..m {
            let mut v = g[k];
            for &(s, u) in &self.u_cols[k] {
                v -= u * g[s];
            }
            g[k] = v / self.u_diag[k];
        }
        // L^T y = h, backward, result lands on original rows.
        for r in c.iter_mut() {
            *r = 0.0;
        }
        for s in (0..m).rev() {
            let mut v = g[s];
            for &(r, l) in &self.l_cols[s] {
                v -= l * c[r];
            }
            c[self.pivot_row[s]] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_cols<'a>(a: &'a [&'a [f64]]) -> impl Fn(usize) -> (Vec<usize>, Vec<f64>) + 'a {
        move |j| {
            let mut rows = Vec::new();
            let mut vals = Vec::new();
            for (i, r) in a.iter().enumerate() {
                if r[j] != 0.0 {
                    rows.push(i);
                    vals.push(r[j]);
                }
            }
            (rows, vals)
        }
    }

    #[test]
    fn ftran_btran_small() {
        let a: Vec<&[f64]> = vec![&[2.0, 1.0, 0.0], &[0.0, 3.0, 1.0], &[1.0, 0.0, 2.0]];
        let lu = LuFactors::factor(3, dense_cols(&a)).unwrap();
        // Solve B x = [5, 10, 8]: by hand x = B^{-1} b.
        let mut b = vec![5.0, 10.0, 8.0];
        lu.ftran(&mut b);
        // Check B x = rhs.
        let x = b;
        for (i, row) in a.iter().enumerate() {
            let ax: f64 = (0..3).map(|j| row[j] * x[j]).sum();
            let want = [5.0, 10.0, 8.0][i];
            assert!((ax - want).abs() < 1e-12, "row {i}: {ax} vs {want}");
        }
        // Transpose solve.
        let mut c = vec![1.0, 2.0, 3.0];
        lu.btran(&mut c);
        for j in 0..3 {
            let aty: f64 = (0..3).map(|i| a[i][j] * c[i]).sum();
            assert!((aty - [1.0, 2.0, 3.0][j]).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_is_trivial() {
        let a: Vec<&[f64]> = vec![&[1.0, 0.0], &[0.0, 1.0]];
        let lu = LuFactors::factor(2, dense_cols(&a)).unwrap();
        let mut b = vec![7.0, -2.0];
        lu.ftran(&mut b);
        assert_eq!(b, vec![7.0, -2.0]);
    }

    #[test]
    fn singular_detected() {
        let a: Vec<&[f64]> = vec![&[1.0, 2.0], &[2.0, 4.0]];
        assert!(LuFactors::factor(2, dense_cols(&a)).is_err());
    }

    #[test]
    fn random_dense_round_trip() {
        // Deterministic pseudo-random matrix, checked against direct products.
        let m = 24;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let a: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if (i + j) % 3 == 0 { rnd() * 4.0 } else { 0.0 }).collect())
            .collect();
        let mut a = a;
        for i in 0..m {
            a[i][i] += 8.0; // diagonally dominant, comfortably nonsingular
        }
        let col = |j: usize| {
            let mut rows = Vec::new();
            let mut vals = Vec::new();
            for i in 0..m {
                if a[i][j] != 0.0 {
                    rows.push(i);
                    vals.push(a[i][j]);
                }
            }
            (rows, vals)
        };
        let lu = LuFactors::factor(m, col).unwrap();
        let rhs: Vec<f64> = (0..m).map(|i| (i as f64) - 3.5).collect();
        let mut x = rhs.clone();
        lu.ftran(&mut x);
        for i in 0..m {
            let ax: f64 = (0..m).map(|j| a[i][j] * x[j]).sum();
            assert!((ax - rhs[i]).abs() < 1e-9);
        }
        let mut y = rhs.clone();
        lu.btran(&mut y);
        for j in 0..m {
            let aty: f64 = (0..m).map(|i| a[i][j] * y[i]).sum();
            assert!((aty - rhs[j]).abs() < 1e-9);
        }
    }
}
