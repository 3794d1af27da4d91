//! Compare backprop gradients with central differences.
//!
//! cargo run --example grad_check

use evver::model::{grad_check, EvverConfig};

fn main() -> anyhow::Result<()> {
    for (hidden, use_dcs, l2) in [(vec![8], false, 0.0), (vec![16, 8], true, 1e-3), (vec![4, 4, 4], true, 0.0)] {
        let mut cfg = EvverConfig::new(10, hidden);
        cfg.use_dcs = use_dcs;
        cfg.l2 = l2;
        let r = grad_check(&cfg, 8, 1e-4, 42)?;
        println!(
            "hidden {:?} dcs {use_dcs} l2 {l2}: {} params, max rel err {:.2e} {}",
            cfg.hidden_dims,
            r.parameters_checked,
            r.max_relative_error,
            if r.passed { "ok" } else { "FAILED" }
        );
    }
    Ok(())
}
