use super::Problem;

/// ZDT1 with `n` variables in `[0, 1]`; true front `f2 = 1 - sqrt(f1)`.
#[derive(Debug, Clone, Copy)]
pub struct Zdt1 {
    pub n: usize,
}

impl Zdt1 {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    /// `count` points of the analytic front, evenly spaced in `f1`.
    pub fn true_front(count: usize) -> Vec<[f64; 2]> {
        (0..count)
            .map(|k| {
                let f1 = k as f64 / (count - 1) as f64;
                [f1, 1.0 - f1.sqrt()]
            })
            .collect()
    }
}

impl Problem for Zdt1 {
    fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, 1.0); self.n]
    }

    fn num_objectives(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, String> {
        let f1 = x[0];
        let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (self.n - 1) as f64;
        let f2 = g * (1.0 - (f1 / g).sqrt());
        Ok(vec![f1, f2])
    }

    fn reference_point(&self) -> Option<Vec<f64>> {
        Some(vec![11.0, 11.0])
    }

    fn instance_ref(&self) -> String {
        format!("zdt1#n={}", self.n)
    }
}
