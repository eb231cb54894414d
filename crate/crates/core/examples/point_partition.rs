//! Almost uniformly distributed centers and their partition of the disk.

use ballneedlets::geometry::{build_point_set, cell_inclusion_check, MembershipIndex};

fn main() -> ballneedlets::Result<()> {
    for eps in [0.4, 0.2, 0.1] {
        let set = build_point_set(eps, 2, 0.5)?;
        let radii: Vec<(f64, f64)> = set.cells.iter().map(|c| cell_inclusion_check(c, 8)).collect();
        let inner = radii.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
        let outer = radii.iter().map(|r| r.1).fold(0.0, f64::max);
        let mass: f64 = set.cell_measures(5)?.iter().sum();
        println!(
            "eps = {eps}: {} cells, radii in [{:.4}, {:.4}], total mass {mass:.12}",
            set.len(),
            inner,
            outer
        );
        let index = MembershipIndex::new(&set);
        let m = index.membership(&[0.31, -0.47], 1e-12);
        println!("   (0.31, -0.47) lies in {} cell(s)", m.interior + m.boundary);
    }
    Ok(())
}
