/// Running mean and standard error with compensated summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Accumulator {
    count: usize,
    sum: f64,
    sum_c: f64,
    sum_sq: f64,
    sum_sq_c: f64,
}

fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let t = *sum + y;
    *comp = (t - *sum) - y;
    *sum = t;
}

impl Accumulator {
    pub(crate) fn push(&mut self, x: f64) {
        self.count += 1;
        kahan_add(&mut self.sum, &mut self.sum_c, x);
        kahan_add(&mut self.sum_sq, &mut self.sum_sq_c, x * x);
    }

    pub(crate) fn count(&self) -> usize {
        self.count
    }

    pub(crate) fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        }
    }

    /// Standard error of the mean from the sample variance; zero for fewer
    /// than two observations.
    pub(crate) fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let mean = self.mean();
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}
