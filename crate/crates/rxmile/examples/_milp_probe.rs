use rxmile::*;
use std::time::Instant;

fn main() {
    let inst = Instance::bundled();
    let model = build(&inst, ModelVariant::Base).unwrap();
    let t = Instant::now();
    let cfg = BnbConfig {
        node_limit: 400,
        node_log: Some("/tmp/nodes.csv".into()),
        ..Default::default()
    };
    match solve_milp(&model, &cfg) {
        Ok(r) => println!(
            "status {:?} obj {:.4} bound {:.4} gap {:.2e} nodes {} lp_iters {} in {:.2?}",
            r.status, r.objective, r.bound, r.gap, r.nodes, r.lp_iterations, t.elapsed()
        ),
        Err(e) => println!("error: {e}"),
    }
}
