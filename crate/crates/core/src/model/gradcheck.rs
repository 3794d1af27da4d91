use ndarray::Array2;
use rand::Rng;

use super::{EvverConfig, Model, ModelError};
use crate::seed;
use crate::types::ClassLabel;

const STEP: f64 = 1e-5;
/// Denominator floor so gradients near zero are compared absolutely.
const FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    pub parameters_checked: usize,
    pub tolerance: f64,
    pub passed: bool,
    /// `(layer, is_bias, flat index)` of the worst parameter.
    pub worst: (usize, bool, usize),
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / (analytic.abs() + numeric.abs()).max(FLOOR)
}

/// Compares backprop gradients with central differences on a random batch,
/// in double precision. Dropout is ignored; the L2 term is included.
pub fn grad_check(config: &EvverConfig, samples: usize, tolerance: f64, seed_v: u64) -> Result<GradCheckReport, ModelError> {
    if samples == 0 {
        return Err(ModelError::Empty);
    }
    let mut rng = seed::fork(seed_v, "gradcheck");
    let mut model = Model::<f64>::init(config.clone(), &mut rng)?;
    for layer in &mut model.layers {
        layer.bias.mapv_inplace(|_| rng.gen_range(-0.5..0.5));
    }
    let features = Array2::from_shape_fn((samples, config.input_dim), |_| rng.gen_range(-1.0f32..1.0));
    let dcs: Option<Vec<f32>> = config.use_dcs.then(|| (0..samples).map(|_| rng.gen_range(0.0f32..=1.0)).collect());
    let labels: Vec<ClassLabel> = (0..samples).map(|_| ClassLabel::ALL[rng.gen_range(0..3)]).collect();
    let x = model.assemble(features.view(), dcs.as_deref())?;

    let (_, grads) = model.loss_and_gradients(&x, &labels, config.l2);
    let mut worst = (0.0, (0, false, 0));
    let mut checked = 0;
    for k in 0..model.layers.len() {
        for is_bias in [false, true] {
            let len = if is_bias { model.layers[k].bias.len() } else { model.layers[k].weights.len() };
            for idx in 0..len {
                let numeric = {
                    let orig = param(&mut model, k, is_bias, idx, None);
                    param(&mut model, k, is_bias, idx, Some(orig + STEP));
                    let plus = model.loss(&x, &labels, config.l2);
                    param(&mut model, k, is_bias, idx, Some(orig - STEP));
                    let minus = model.loss(&x, &labels, config.l2);
                    param(&mut model, k, is_bias, idx, Some(orig));
                    (plus - minus) / (2.0 * STEP)
                };
                let analytic = if is_bias { grads[k].bias[idx] } else { grads[k].weights.as_slice().expect("standard layout")[idx] };
                let err = relative_error(analytic, numeric);
                if err > worst.0 || err.is_nan() {
                    worst = (err, (k, is_bias, idx));
                }
                checked += 1;
            }
        }
    }
    Ok(GradCheckReport {
        max_relative_error: worst.0,
        parameters_checked: checked,
        tolerance,
        passed: worst.0 < tolerance,
        worst: worst.1,
    })
}

/// Reads a parameter, optionally overwriting it; returns the old value.
fn param(model: &mut Model<f64>, layer: usize, bias: bool, idx: usize, set: Option<f64>) -> f64 {
    let slot = if bias {
        &mut model.layers[layer].bias[idx]
    } else {
        &mut model.layers[layer].weights.as_slice_mut().expect("standard layout")[idx]
    };
    let old = *slot;
    if let Some(v) = set {
        *slot = v;
    }
    old
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_network_passes() {
        let mut cfg = EvverConfig::new(5, vec![4, 3]);
        cfg.use_dcs = true;
        cfg.l2 = 1e-2;
        let r = grad_check(&cfg, 8, 1e-4, 1).unwrap();
        assert_eq!(r.parameters_checked, cfg.parameter_count());
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn broken_gradient_is_caught() {
        // sanity on the comparison itself
        assert!(relative_error(1.0, 1.1) > 1e-2);
        assert!(relative_error(1e-12, 0.0) < 1e-4);
        assert_eq!(relative_error(0.0, 0.0), 0.0);
    }
}
