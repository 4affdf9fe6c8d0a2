use neugn_neural_nav::ModelParams;

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPS: f64 = 1e-8;

/// Adam with bias correction; moments mirror the parameter structure.
pub struct Adam {
    m: ModelParams,
    v: ModelParams,
    step: u64,
}

impl Adam {
    pub fn new(params: &ModelParams) -> Self {
        Adam {
            m: params.zeros_like(),
            v: params.zeros_like(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// One update over every parameter tensor. `grads` must be shaped like
    /// `params` (the output of the accumulation loop).
    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams, lr: f64) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - BETA1.powi(t);
        let bc2 = 1.0 - BETA2.powi(t);
        for name in params.tensor_names() {
            let g = grads.tensor(&name).expect("gradient tensor");
            let mut m_t = self.m.tensor(&name).expect("first moment");
            let mut v_t = self.v.tensor(&name).expect("second moment");
            for ((m, v), &g) in m_t.data_mut().iter_mut().zip(v_t.data_mut()).zip(g.data()) {
                *m = BETA1 * *m + (1.0 - BETA1) * g;
                *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            }
            params.with_tensor_mut(&name, |w| {
                for ((w, &m), &v) in w.data_mut().iter_mut().zip(m_t.data()).zip(v_t.data()) {
                    *w -= lr * (m / bc1) / ((v / bc2).sqrt() + EPS);
                }
            });
            self.m.with_tensor_mut(&name, |t| *t = m_t.clone());
            self.v.with_tensor_mut(&name, |t| *t = v_t.clone());
        }
    }

    /// Moment tensors plus the step counter, for checkpoint files.
    pub fn state_tensors(&self) -> Vec<(String, neugn_neural_nav::Tensor)> {
        let mut out = vec![(
            "opt.step".to_string(),
            neugn_neural_nav::Tensor::from_vec(&[1], vec![self.step as f64]),
        )];
        self.m.visit(|name, t| out.push((format!("opt.m.{name}"), t.clone())));
        self.v.visit(|name, t| out.push((format!("opt.v.{name}"), t.clone())));
        out
    }
}
