//! Gauss–Legendre rules and an adaptive bisection integrator.

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Scalar> GaussLegendre<T> {
    /// Nodes by Newton iteration on the three-term Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nf = lit::<T>(n as f64);
        let eps = T::epsilon();
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess
            let k = lit::<T>(i as f64 + 0.75);
            let mut x = (T::PI() * k / (nf + lit(0.5))).cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= eps * lit(2.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: T, b: T) -> impl Iterator<Item = (T, T)> + '_ {
        let half = lit::<T>(0.5) * (b - a);
        let mid = lit::<T>(0.5) * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> T {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = lit::<T>(k as f64);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = lit::<T>(n as f64);
    let d = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Adaptive bisection. The error of a panel is estimated as the difference
/// between its rule estimate and the sum over its two halves; `tol` bounds
/// the summed estimate over all panels.
#[derive(Clone, Debug)]
pub struct Adaptive<T> {
    rule: GaussLegendre<T>,
    tol: T,
    max_depth: usize,
}

impl<T: Scalar> Adaptive<T> {
    pub fn new(points: usize, tol: T) -> Self {
        Self {
            rule: GaussLegendre::new(points),
            tol,
            max_depth: 80,
        }
    }

    pub fn with_max_depth(mut self, depth: usize) -> Self {
        self.max_depth = depth;
        self
    }

    /// Global adaptive integration: the panel with the largest error
    /// estimate is bisected until the summed estimate falls below the
    /// tolerance.
    pub fn integrate(&self, a: T, b: T, mut f: impl FnMut(T) -> T) -> Result<T> {
        let mut panels = vec![self.panel(a, b, 0, &mut f)?];
        let mut total_err = panels[0].err;
        while total_err > self.tol {
            let (worst, _) = panels
                .iter()
                .enumerate()
                .fold((0, -T::one()), |best, (i, p)| if p.err > best.1 { (i, p.err) } else { best });
            let p = panels.swap_remove(worst);
            if p.depth >= self.max_depth {
                return Err(Error::Integrability(format!(
                    "no convergence on [{}, {}] after {} bisections (error estimate {:e})",
                    to_f64(p.a),
                    to_f64(p.b),
                    p.depth,
                    to_f64(total_err)
                )));
            }
            let mid = lit::<T>(0.5) * (p.a + p.b);
            let left = self.panel(p.a, mid, p.depth + 1, &mut f)?;
            let right = self.panel(mid, p.b, p.depth + 1, &mut f)?;
            total_err = total_err - p.err + left.err + right.err;
            panels.push(left);
            panels.push(right);
            if panels.len() % 64 == 0 {
                // refresh to avoid drift from repeated subtraction
                total_err = panels.iter().map(|p| p.err).sum();
            }
        }
        Ok(panels.iter().map(|p| p.value).sum())
    }

    fn panel(&self, a: T, b: T, depth: usize, f: &mut impl FnMut(T) -> T) -> Result<Panel<T>> {
        let mid = lit::<T>(0.5) * (a + b);
        let coarse = self.rule.integrate(a, b, &mut *f);
        let value = self.rule.integrate(a, mid, &mut *f) + self.rule.integrate(mid, b, &mut *f);
        if !value.is_finite() || !coarse.is_finite() {
            return Err(Error::Integrability(format!(
                "non-finite panel estimate on [{}, {}]",
                to_f64(a),
                to_f64(b)
            )));
        }
        Ok(Panel {
            a,
            b,
            depth,
            value,
            err: (value - coarse).abs(),
        })
    }
}

struct Panel<T> {
    a: T,
    b: T,
    depth: usize,
    value: T,
    err: T,
}
