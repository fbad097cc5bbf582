//! Sign of each bound on the slice p(1,0|x) = 0, p(0,1|x) = 1/2 - p(0,0|x),
//! drawn as characters: '#' classical and quantum positive, '+' classical
//! only, 'q' quantum only, '|' non-signaling non-negative, '.' none.

use qace::region::{region_grid, summarize};

fn main() {
    let n = 26;
    let cells = region_grid(n);
    for j in (0..n).rev() {
        let row: String = (0..n)
            .map(|i| {
                let c = &cells[i * n + j];
                match (
                    c.classical_positive(),
                    c.quantum_positive(),
                    c.ns_nonnegative(),
                ) {
                    (_, _, true) => '|',
                    (true, true, _) => '#',
                    (true, false, _) => '+',
                    (false, true, _) => 'q',
                    _ => '.',
                }
            })
            .collect();
        println!("{row}");
    }
    println!("{:?}", summarize(&cells, n));
}
