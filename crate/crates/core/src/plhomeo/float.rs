use super::PlMap;

/// Double-precision copy of a [`PlMap`] for numeric evidence (orbit gaps).
#[derive(Debug, Clone, PartialEq)]
pub struct FloatPlMap {
    period: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl FloatPlMap {
    pub fn from_exact(f: &PlMap) -> Self {
        let p = f.period().to_f64();
        let mut xs: Vec<f64> = f.breakpoints().iter().map(|b| b.x.to_f64()).collect();
        let mut ys: Vec<f64> = f.breakpoints().iter().map(|b| b.y.to_f64()).collect();
        xs.push(xs[0] + p);
        ys.push(ys[0] + p);
        FloatPlMap { period: p, xs, ys }
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x0 = self.xs[0];
        let m = ((x - x0) / self.period).floor();
        let xr = x - m * self.period;
        let k = self.xs.len() - 1;
        let i = self.xs[..k].partition_point(|&b| b <= xr).max(1) - 1;
        let t = (xr - self.xs[i]) / (self.xs[i + 1] - self.xs[i]);
        self.ys[i] + t * (self.ys[i + 1] - self.ys[i]) + m * self.period
    }

    pub fn inverse(&self) -> Self {
        let p = self.period;
        let k = self.xs.len() - 1;
        // y_0 < ... < y_(k-1) < y_0 + p already forms a window
        let mut xs: Vec<f64> = self.ys[..k].to_vec();
        let mut ys: Vec<f64> = self.xs[..k].to_vec();
        xs.push(xs[0] + p);
        ys.push(ys[0] + p);
        FloatPlMap { period: p, xs, ys }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plhomeo::Breakpoint;
    use crate::qfield::QNum;

    #[test]
    fn matches_exact_evaluation() {
        let q = |s: &str| QNum::parse(s, 2).unwrap();
        let f = PlMap::new(
            q("1+1*sqrt(2)"),
            vec![
                Breakpoint::new(q("0"), q("1/3")),
                Breakpoint::new(q("1/2"), q("3/2")),
            ],
        )
        .unwrap();
        let ff = f.to_float();
        let inv = ff.inverse();
        for s in ["0", "1/5", "-7/3", "5+1*sqrt(2)", "2/9-3*sqrt(2)"] {
            let x = q(s);
            let exact = f.eval(&x).to_f64();
            assert!((ff.eval(x.to_f64()) - exact).abs() < 1e-12, "{s}");
            assert!((inv.eval(exact) - x.to_f64()).abs() < 1e-12, "{s}");
        }
    }
}
