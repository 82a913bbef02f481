//! Rank-1 lattices: the randomly shifted and jittered (RSJ) sampler and the
//! fundamental cells used as strata for generalized stratified sampling.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{stratum_point, PointSet, RngStream};
use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

/// One draw of an RSJ rank-1 lattice with `n` (prime) points in `[0,1)^d`.
///
/// `p_j = y_{π(j)} + U + J_j mod 1` with `y_j = (j−1) g / n`, `g` uniform in
/// `{1/n, …, (n−1)/n}^d`, `U` uniform on the `1/n` grid and `J_j` uniform in
/// `[0, 1/n)^d`. For `n = 2` the generator is always the diagonal `(1/2, …)`.
pub fn sample_rsj(n: usize, d: usize, rng: &mut RngStream) -> Result<PointSet> {
    if !is_prime(n as u64) {
        return Err(Error::NotPrime(n as u64));
    }
    let nn = n as u64;
    let g: Vec<u64> = (0..d).map(|_| rng.random_range(1..nn)).collect();
    let shift: Vec<u64> = (0..d).map(|_| rng.random_range(0..nn)).collect();
    let mut perm: Vec<u64> = (0..nn).collect();
    perm.shuffle(rng);
    let mut data = Vec::with_capacity(n * d);
    for &k in &perm {
        for i in 0..d {
            let cell = (k * g[i] + shift[i]) % nn;
            data.push(stratum_point(cell, rng.random::<f64>(), nn));
        }
    }
    Ok(PointSet::from_raw(d, n, data))
}

/// Fundamental parallelepipeds of a two-dimensional rank-1 lattice on the torus.
///
/// The lattice `{k g / n mod 1}` is described by a Lagrange-reduced basis, so
/// the cells are the short, slanted parallelograms of the usual picture. Cell
/// `k` is attached to the lattice point `k g / n mod 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeCells {
    n: u64,
    g: [u64; 2],
    /// Reduced basis in units of `1/n`.
    basis: [[i64; 2]; 2],
    g0_inv: u64,
}

impl LatticeCells {
    pub fn new(g: &[u64], n: u64) -> Result<Self> {
        if !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        if g.len() != 2 {
            return Err(Error::Unsupported(format!(
                "lattice-cell strata are implemented for d = 2 only (got generator of length {})",
                g.len()
            )));
        }
        if g.iter().any(|&c| c == 0 || c >= n) {
            return Err(Error::invalid("lattice generator entries must lie in 1..n-1"));
        }
        let g0_inv = mod_inverse(g[0], n);
        let h = (g[1] * g0_inv % n) as i64;
        let basis = lagrange_reduce([1, h], [0, n as i64]);
        Ok(LatticeCells {
            n,
            g: [g[0], g[1]],
            basis,
            g0_inv,
        })
    }

    pub fn count(&self) -> usize {
        self.n as usize
    }

    pub fn basis(&self) -> [[i64; 2]; 2] {
        self.basis
    }

    fn lattice_point(&self, k: u64) -> [f64; 2] {
        let nf = self.n as f64;
        [
            (k * self.g[0] % self.n) as f64 / nf,
            (k * self.g[1] % self.n) as f64 / nf,
        ]
    }

    /// Index of the cell containing `x`.
    pub fn cell_of(&self, x: &[f64]) -> usize {
        let nf = self.n as f64;
        let [[a, b], [c, e]] = self.basis;
        let det = (a * e - b * c) as f64;
        let (px, py) = (x[0] * nf, x[1] * nf);
        // coefficients of x in the basis (u = row 0, v = row 1)
        let cu = (px * e as f64 - py * c as f64) / det;
        let cv = (py * a as f64 - px * b as f64) / det;
        let (fu, fv) = (cu.floor() as i64, cv.floor() as i64);
        let n = self.n as i64;
        let l0 = (fu * a + fv * c).rem_euclid(n) as u64;
        (l0 * self.g0_inv % self.n) as usize
    }

    /// Uniform point inside cell `k`.
    pub fn sample_in_cell<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> [f64; 2] {
        let nf = self.n as f64;
        let y = self.lattice_point(k as u64);
        let (s, t) = (rng.random::<f64>(), rng.random::<f64>());
        let [[a, b], [c, e]] = self.basis;
        [
            wrap_unit(y[0] + (s * a as f64 + t * c as f64) / nf),
            wrap_unit(y[1] + (s * b as f64 + t * e as f64) / nf),
        ]
    }

    /// Corners of cell `k` as a parallelogram in the plane (not reduced mod 1).
    pub fn cell_polygon(&self, k: usize) -> [[f64; 2]; 4] {
        let nf = self.n as f64;
        let y = self.lattice_point(k as u64);
        let [[a, b], [c, e]] = self.basis;
        let u = [a as f64 / nf, b as f64 / nf];
        let v = [c as f64 / nf, e as f64 / nf];
        [
            y,
            [y[0] + u[0], y[1] + u[1]],
            [y[0] + u[0] + v[0], y[1] + u[1] + v[1]],
            [y[0] + v[0], y[1] + v[1]],
        ]
    }

    /// Area of cell `k` (taken mod 1) inside the corner box `[0,u1) × [0,u2)`.
    pub fn corner_overlap(&self, k: usize, upper: &[f64]) -> f64 {
        let poly = self.cell_polygon(k);
        let (mut xmin, mut xmax, mut ymin, mut ymax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for p in &poly {
            xmin = xmin.min(p[0]);
            xmax = xmax.max(p[0]);
            ymin = ymin.min(p[1]);
            ymax = ymax.max(p[1]);
        }
        let mut area = 0.0;
        for mx in (-xmax.ceil() as i64)..=((1.0 - xmin).ceil() as i64) {
            for my in (-ymax.ceil() as i64)..=((1.0 - ymin).ceil() as i64) {
                let shifted: Vec<[f64; 2]> = poly
                    .iter()
                    .map(|p| [p[0] + mx as f64, p[1] + my as f64])
                    .collect();
                area += polygon_area(&clip_to_rect(&shifted, upper[0], upper[1]));
            }
        }
        area
    }
}

fn wrap_unit(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

fn lagrange_reduce(mut u: [i64; 2], mut v: [i64; 2]) -> [[i64; 2]; 2] {
    let dot = |a: [i64; 2], b: [i64; 2]| a[0] * b[0] + a[1] * b[1];
    loop {
        if dot(u, u) > dot(v, v) {
            std::mem::swap(&mut u, &mut v);
        }
        let mu = (dot(u, v) as f64 / dot(u, u) as f64).round() as i64;
        if mu == 0 {
            return [u, v];
        }
        v = [v[0] - mu * u[0], v[1] - mu * u[1]];
    }
}

/// Sutherland–Hodgman clipping of a convex polygon to `[0,w] × [0,h]`.
fn clip_to_rect(poly: &[[f64; 2]], w: f64, h: f64) -> Vec<[f64; 2]> {
    let mut out = poly.to_vec();
    // (axis, bound, keep_below)
    for (axis, bound, below) in [(0, 0.0, false), (0, w, true), (1, 0.0, false), (1, h, true)] {
        if out.is_empty() {
            break;
        }
        let inside = |p: &[f64; 2]| if below { p[axis] <= bound } else { p[axis] >= bound };
        let input = std::mem::take(&mut out);
        for i in 0..input.len() {
            let cur = input[i];
            let prev = input[(i + input.len() - 1) % input.len()];
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
                out.push([
                    prev[0] + t * (cur[0] - prev[0]),
                    prev[1] + t * (cur[1] - prev[1]),
                ]);
            }
            if ci {
                out.push(cur);
            }
        }
    }
    out
}

fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    (s / 2.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn primality() {
        let primes: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn reduced_basis_has_unit_covolume() {
        for (g, n) in [([1, 2], 5), ([1, 3], 7), ([2, 5], 11), ([3, 1], 13)] {
            let cells = LatticeCells::new(&g, n).unwrap();
            let [[a, b], [c, e]] = cells.basis();
            assert_eq!((a * e - b * c).abs(), n as i64);
        }
        // the picture's cells for g = (1,2), n = 5 have edges (1,2) and (2,-1)
        let cells = LatticeCells::new(&[1, 2], 5).unwrap();
        let [u, v] = cells.basis();
        assert_eq!(u[0] * u[0] + u[1] * u[1], 5);
        assert_eq!(v[0] * v[0] + v[1] * v[1], 5);
    }

    #[test]
    fn cells_partition_the_torus() {
        let cells = LatticeCells::new(&[1, 2], 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // brute-force area of each cell via a fine grid
        let m = 400;
        let mut counts = [0usize; 5];
        for i in 0..m {
            for j in 0..m {
                let x = [(i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64];
                counts[cells.cell_of(&x)] += 1;
            }
        }
        for c in counts {
            assert!((c as f64 / (m * m) as f64 - 0.2).abs() < 0.01);
        }
        for k in 0..5 {
            for _ in 0..200 {
                let p = cells.sample_in_cell(k, &mut rng);
                assert_eq!(cells.cell_of(&p), k);
            }
        }
    }

    #[test]
    fn corner_overlaps_sum_to_box_area() {
        let cells = LatticeCells::new(&[2, 3], 7).unwrap();
        for upper in [[1.0, 1.0], [0.5, 0.5], [0.3, 0.9], [0.77, 0.12]] {
            let total: f64 = (0..7).map(|k| cells.corner_overlap(k, &upper)).sum();
            assert!((total - upper[0] * upper[1]).abs() < 1e-12, "{upper:?}");
        }
        for k in 0..7 {
            assert!((cells.corner_overlap(k, &[1.0, 1.0]) - 1.0 / 7.0).abs() < 1e-12);
        }
    }

    #[test]
    fn corner_overlap_matches_grid_count() {
        let cells = LatticeCells::new(&[1, 2], 5).unwrap();
        let upper = [0.6, 0.35];
        let m = 500;
        let mut counts = [0usize; 5];
        for i in 0..m {
            for j in 0..m {
                let x = [(i as f64 + 0.5) / m as f64, (j as f64 + 0.5) / m as f64];
                if x[0] < upper[0] && x[1] < upper[1] {
                    counts[cells.cell_of(&x)] += 1;
                }
            }
        }
        for (k, c) in counts.iter().enumerate() {
            let grid = *c as f64 / (m * m) as f64;
            assert!((grid - cells.corner_overlap(k, &upper)).abs() < 5e-3);
        }
    }

    #[test]
    fn lattice_cell_errors() {
        assert_eq!(LatticeCells::new(&[1, 2], 6), Err(Error::NotPrime(6)));
        assert!(LatticeCells::new(&[0, 2], 5).is_err());
        assert!(matches!(
            LatticeCells::new(&[1, 2, 3], 5),
            Err(Error::Unsupported(_))
        ));
    }
}
