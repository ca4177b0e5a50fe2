// Diagnostic: correlation of lg W vs lg E for exp(+sum x^2) and exp(-sum x^2).
use wafom_core::net::NetParams;
use wafom_core::{correlation, random_net, rmse_estimate_fn, WafomEngine, WeightSpec};

fn main() {
    let p = NetParams::new(2, 4, 32, 10).unwrap();
    let w = WeightSpec::dick_plus_hamming(4, 32);
    let engine = WafomEngine::new(4, 32, &w).unwrap();
    let n_nets = 1000u64;
    let mut lgw = Vec::new();
    let mut lge_plus = Vec::new();
    let mut lge_minus = Vec::new();
    for k in 0..n_nets {
        let net = random_net(p, 31_000 + k);
        lgw.push(engine.wafom(&net).unwrap().lg_w);
        let plus = rmse_estimate_fn(
            &net,
            |x| Ok(x.iter().map(|v| v * v).sum::<f64>().exp()),
            1024,
            9090,
            2 * k,
        )
        .unwrap();
        let minus = rmse_estimate_fn(
            &net,
            |x| Ok((-x.iter().map(|v| v * v).sum::<f64>()).exp()),
            1024,
            9090,
            2 * k + 1,
        )
        .unwrap();
        lge_plus.push(plus.lg_e);
        lge_minus.push(minus.lg_e);
    }
    println!("corr exp(+sum x^2) = {:.4}", correlation(&lgw, &lge_plus).unwrap());
    println!("corr exp(-sum x^2) = {:.4}", correlation(&lgw, &lge_minus).unwrap());
}
