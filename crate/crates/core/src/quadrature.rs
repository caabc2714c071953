//! Quadrature on the tetrahedron (barycentric points, weights normalised to
//! unit volume) and on segments.

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub points: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
    pub degree: u32,
}

impl QuadratureRule {
    /// Centroid rule, exact for affine integrands.
    pub fn centroid() -> Self {
        QuadratureRule {
            points: vec![[0.25; 4]],
            weights: vec![1.0],
            degree: 1,
        }
    }

    /// 14-point symmetric rule with positive weights, exact through degree 5.
    pub fn degree5() -> Self {
        let mut points = Vec::with_capacity(14);
        let mut weights = Vec::with_capacity(14);
        let orbits4 = [
            (0.092_735_250_310_891_2, 0.073_493_043_116_361_96),
            (0.310_885_919_263_300_6, 0.112_687_925_718_015_85),
        ];
        for (a, w) in orbits4 {
            let b = 1.0 - 3.0 * a;
            for k in 0..4 {
                let mut p = [a; 4];
                p[k] = b;
                points.push(p);
                weights.push(w);
            }
        }
        let a = 0.454_496_295_874_350_4;
        let b = 0.5 - a;
        for (i, j) in crate::whitney::LOCAL_EDGES {
            let mut p = [b; 4];
            p[i] = a;
            p[j] = a;
            points.push(p);
            weights.push(0.042_546_020_777_081_47);
        }
        QuadratureRule {
            points,
            weights,
            degree: 5,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64; 4], f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }
}

/// Two-point Gauss–Legendre rule on `[0, 1]`: `(parameter, weight)` pairs.
pub fn gauss2_segment() -> [(f64, f64); 2] {
    let d = 0.5 / 3f64.sqrt();
    [(0.5 - d, 0.5), (0.5 + d, 0.5)]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// Exact integral of x^a y^b z^c over the unit reference tet.
    fn monomial_integral(a: u32, b: u32, c: u32) -> f64 {
        factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3)
    }

    #[test]
    fn degree5_rule_is_exact_through_degree_five() {
        let rule = QuadratureRule::degree5();
        assert_eq!(rule.len(), 14);
        assert!(rule.weights.iter().all(|&w| w > 0.0));
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        for p in &rule.points {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        for a in 0..=5u32 {
            for b in 0..=5 - a {
                for c in 0..=5 - a - b {
                    let approx: f64 = rule
                        .iter()
                        .map(|(p, w)| w / 6.0 * p[1].powi(a as i32) * p[2].powi(b as i32) * p[3].powi(c as i32))
                        .sum();
                    let exact = monomial_integral(a, b, c);
                    assert!(
                        (approx - exact).abs() < 1e-14,
                        "x^{a} y^{b} z^{c}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn degree5_rule_is_not_exact_at_degree_six() {
        let rule = QuadratureRule::degree5();
        let approx: f64 = rule.iter().map(|(p, w)| w / 6.0 * p[1].powi(6)).sum();
        assert!((approx - monomial_integral(6, 0, 0)).abs() > 1e-10);
    }

    #[test]
    fn gauss2_integrates_cubics() {
        let g = gauss2_segment();
        let approx: f64 = g.iter().map(|&(s, w)| w * s.powi(3)).sum();
        assert!((approx - 0.25).abs() < 1e-15);
    }
}
