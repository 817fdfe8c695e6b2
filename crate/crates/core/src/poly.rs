//! Complex polynomials in ascending coefficient order and a root finder that
//! reports roots on the Riemann sphere with multiplicities.
//!
//! Roots are computed as eigenvalues of a balanced companion matrix, polished
//! by Newton steps, and grouped into multiple roots when the Taylor expansion
//! at the cluster center vanishes to the configured order.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sphere::StereoPoint;
use crate::tolerance::Tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Linkage radii (chordal) tried from coarse to fine when searching for
/// multiple roots.
const LINKAGE_RADII: [f64; 13] = [
    0.3, 0.1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5, 1e-5, 3e-6, 1e-6, 3e-7,
];

/// Horner evaluation of Σ a_i z^i.
pub fn eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
}

/// Value and first derivative.
pub fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = ZERO;
    let mut dp = ZERO;
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// Coefficients of the product Π (z − r_i), ascending.
pub fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![ZERO; c.len() + 1];
        for (i, &a) in c.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= a * r;
        }
        c = next;
    }
    c
}

/// Product of two polynomials.
pub fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Taylor coefficients at `c`: t_j with p(z) = Σ t_j (z − c)^j.
pub fn taylor_shift(coeffs: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let mut t = coeffs.to_vec();
    let n = t.len();
    for j in 0..n {
        for i in (j..n - 1).rev() {
            let hi = t[i + 1];
            t[i] += c * hi;
        }
    }
    t
}

/// Magnitude bounds Σ_i |a_i| C(i,j) |c|^{i−j} for the Taylor coefficients at `c`.
fn taylor_scales(coeffs: &[Complex64], c: Complex64) -> Vec<f64> {
    let abs: Vec<Complex64> = coeffs.iter().map(|a| Complex64::new(a.norm(), 0.0)).collect();
    taylor_shift(&abs, Complex64::new(c.norm(), 0.0))
        .into_iter()
        .map(|t| t.re)
        .collect()
}

/// Eigenvalues of the companion matrix of a monic polynomial given by its
/// lower coefficients b_0 … b_{m−1}.
fn companion_eigenvalues(b: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = b.len();
    let mut c = DMatrix::<Complex64>::zeros(m, m);
    for i in 1..m {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..m {
        c[(i, m - 1)] = -b[i];
    }
    balance(&mut c);
    let schur = Schur::try_new(c, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("companion eigenvalue iteration did not converge".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..m).map(|i| t[(i, i)]).collect())
}

/// Parlett–Reinsch balancing by powers of two.
fn balance(a: &mut DMatrix<Complex64>) {
    let n = a.nrows();
    let radix = 2.0f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut cc = c;
            let g = r / radix;
            while cc < g {
                f *= radix;
                cc *= radix * radix;
            }
            let g = r * radix;
            while cc > g {
                f /= radix;
                cc /= radix * radix;
            }
            if (cc + r / f) < 0.95 * s {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// Newton polish that only accepts residual-decreasing steps.
fn polish(coeffs: &[Complex64], z0: Complex64, steps: usize) -> Complex64 {
    let mut z = z0;
    let (mut p, mut dp) = eval_with_derivative(coeffs, z);
    for _ in 0..steps {
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        let cand = z - p / dp;
        let (pc, dpc) = eval_with_derivative(coeffs, cand);
        if !(pc.norm() < p.norm()) {
            break;
        }
        z = cand;
        p = pc;
        dp = dpc;
    }
    z
}

/// A root location in one of two charts: `z` near the north (|z| ≤ 1) or
/// `w = 1/z` near the south.
#[derive(Debug, Clone, Copy)]
enum Chart {
    North(Complex64),
    South(Complex64),
}

fn from_chart(c: Chart) -> StereoPoint {
    match c {
        Chart::North(z) => StereoPoint::Finite(z),
        Chart::South(w) if w.norm() == 0.0 => StereoPoint::Infinity,
        Chart::South(w) => StereoPoint::Finite(1.0 / w),
    }
}

/// Roots of Σ a_i ζ^i regarded as a polynomial of nominal degree `a.len() − 1`,
/// returned as distinct points with multiplicities summing to the nominal
/// degree. Missing top-degree terms become roots at ∞.
pub fn find_roots(a: &[Complex64], tol: &Tolerances) -> Result<Vec<(StereoPoint, usize)>> {
    let n = a.len().saturating_sub(1);
    let max = a.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if !(max > tol.zero_poly) {
        return Err(Error::AllZeroPolynomial);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let negligible = |c: &Complex64| c.norm() <= tol.infinity * max;
    let top = (0..=n).rev().find(|&i| !negligible(&a[i])).unwrap();
    let bottom = (0..=n).find(|&i| !negligible(&a[i])).unwrap();

    let mut points: Vec<StereoPoint> = Vec::with_capacity(n);
    points.extend(std::iter::repeat_n(StereoPoint::Infinity, n - top));
    points.extend(std::iter::repeat_n(StereoPoint::Finite(ZERO), bottom));

    let core = &a[bottom..=top];
    let m = core.len() - 1;
    let reversed: Vec<Complex64> = a.iter().rev().copied().collect();
    if m == 1 {
        points.push(StereoPoint::Finite(-core[0] / core[1]));
    } else if m > 1 {
        let lead = core[m];
        let monic: Vec<Complex64> = core[..m].iter().map(|c| c / lead).collect();
        for z in companion_eigenvalues(&monic)? {
            let p = if z.norm() <= 1.0 {
                StereoPoint::Finite(polish(a, z, 8))
            } else {
                let w = polish(&reversed, 1.0 / z, 8);
                from_chart(Chart::South(w))
            };
            points.push(p);
        }
    }
    Ok(group_roots(a, &reversed, points, tol))
}

/// Groups the N computed roots into distinct roots with multiplicity.
fn group_roots(
    a: &[Complex64],
    reversed: &[Complex64],
    points: Vec<StereoPoint>,
    tol: &Tolerances,
) -> Vec<(StereoPoint, usize)> {
    let mut free: Vec<StereoPoint> = points;
    let mut groups: Vec<(StereoPoint, usize)> = Vec::new();

    for &radius in LINKAGE_RADII.iter() {
        if free.len() < 2 {
            break;
        }
        let comps = components(&free, radius);
        let mut taken = vec![false; free.len()];
        for comp in comps.iter().filter(|c| c.len() >= 2) {
            let members: Vec<StereoPoint> = comp.iter().map(|&i| free[i]).collect();
            if let Some(center) = accept_cluster(a, reversed, &members, radius, tol) {
                groups.push((center, comp.len()));
                for &i in comp {
                    taken[i] = true;
                }
            }
        }
        free = free
            .into_iter()
            .zip(taken)
            .filter_map(|(p, t)| (!t).then_some(p))
            .collect();
    }
    groups.extend(free.into_iter().map(|p| (p, 1)));

    // Unconditional merge of anything closer than the clustering tolerance.
    loop {
        let mut merged = false;
        'outer: for i in 0..groups.len() {
            for j in i + 1..groups.len() {
                if groups[i].0.chordal(&groups[j].0) < tol.cluster {
                    let (pj, kj) = groups.remove(j);
                    let (pi, ki) = groups[i];
                    groups[i] = (weighted_center(&[(pi, ki), (pj, kj)]), ki + kj);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    groups
}

/// Single-linkage components under the chordal metric.
fn components(points: &[StereoPoint], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut k = i;
        while parent[k] != r {
            let next = parent[k];
            parent[k] = r;
            k = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if points[i].chordal(&points[j]) < radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri] = rj;
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = out.len();
            out.push(Vec::new());
        }
        out[index[r]].push(i);
    }
    out
}

fn weighted_center(items: &[(StereoPoint, usize)]) -> StereoPoint {
    let mut v = [0.0; 3];
    for (p, k) in items {
        let d = p.to_direction().to_vector();
        for i in 0..3 {
            v[i] += d[i] * *k as f64;
        }
    }
    crate::sphere::Direction::from_vector(v).to_stereo()
}

/// Tests whether `members` are one root of multiplicity `members.len()`;
/// returns the refined center if so.
fn accept_cluster(
    a: &[Complex64],
    reversed: &[Complex64],
    members: &[StereoPoint],
    radius: f64,
    tol: &Tolerances,
) -> Option<StereoPoint> {
    let k = members.len();
    let north = members
        .iter()
        .map(|p| p.to_direction().to_vector()[2])
        .sum::<f64>()
        >= 0.0;
    let (poly, coords): (&[Complex64], Vec<Complex64>) = if north {
        (
            a,
            members
                .iter()
                .map(|p| match p {
                    StereoPoint::Finite(z) => *z,
                    StereoPoint::Infinity => Complex64::new(f64::INFINITY, 0.0),
                })
                .collect(),
        )
    } else {
        (
            reversed,
            members
                .iter()
                .map(|p| match p {
                    StereoPoint::Finite(z) => 1.0 / z,
                    StereoPoint::Infinity => ZERO,
                })
                .collect(),
        )
    };
    if coords.iter().any(|z| !z.is_finite()) {
        return None;
    }
    if poly.len() <= k {
        return None;
    }
    let centroid: Complex64 = coords.iter().sum::<Complex64>() / k as f64;
    let mut c = centroid;
    let mut t = taylor_shift(poly, c);
    // Newton on the (k−1)th derivative, which has a simple root at a k-fold root.
    for _ in 0..4 {
        if t[k].norm() == 0.0 {
            break;
        }
        let step = -t[k - 1] / (t[k] * k as f64);
        let cand = c + step;
        let tc = taylor_shift(poly, cand);
        if !(tc[k - 1].norm() < t[k - 1].norm()) {
            break;
        }
        c = cand;
        t = tc;
    }
    // Stay within the linkage neighbourhood of the centroid.
    let chart_point = |z: Complex64| {
        if north {
            from_chart(Chart::North(z))
        } else {
            from_chart(Chart::South(z))
        }
    };
    let center = chart_point(c);
    if center.chordal(&chart_point(centroid)) > radius {
        return None;
    }
    let scales = taylor_scales(poly, c);
    let vanishing = (0..k).all(|j| t[j].norm() <= tol.multiplicity * scales[j].max(f64::MIN_POSITIVE));
    vanishing.then_some(center)
}
