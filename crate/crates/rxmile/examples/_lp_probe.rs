use rxmile::*;
use std::time::Instant;

fn main() {
    let inst = Instance::bundled();
    let model = build(&inst, ModelVariant::Base).unwrap();
    let lp = model.to_lp();
    let t = Instant::now();
    let r = solve_lp(&lp, &SolveLimits::default()).unwrap();
    println!(
        "status {:?} obj {:.4} iters {} in {:.2?}",
        r.status, r.objective, r.iterations, t.elapsed()
    );
    match rxmile::simplex::verify_certificate(&lp, &r, 1e-9, 1e-6) {
        Ok(()) => println!("certificate ok"),
        Err(e) => println!("certificate FAILED: {e}"),
    }
}
