use std::time::Instant;

use symsq::petersson::{delta_geometric, PeterssonParams};

fn probe(k: u32, m: u64, n: u64, tol: f64) {
    let p = PeterssonParams::new(k, 1, m, n, tol).unwrap();
    eprintln!("k={k} (m,n)=({m},{n}) tol={tol:.0e}: c_max={} tail={:.2e}", p.c_max, p.tail_bound);
    let t = Instant::now();
    let d = delta_geometric(k, 1, m, n, tol).unwrap();
    eprintln!("    delta={d:.3e}  in {:.2?}", t.elapsed());
}

fn main() {
    probe(4, 1, 1, 1e-9);
    probe(4, 1, 2, 1e-7);
    probe(4, 2, 2, 1e-7);
    probe(4, 2, 3, 1e-7);
    probe(4, 3, 3, 1e-7);
    probe(4, 1, 5, 3e-7);
    probe(4, 2, 5, 3e-7);
    probe(4, 5, 5, 3e-7);
    probe(4, 3, 7, 3e-7);
    probe(6, 10, 10, 1e-9);
    probe(8, 10, 10, 1e-9);
    probe(10, 10, 10, 1e-9);
}
