//! Alpha filtration (radius convention) of a small cloud, printed in the
//! `dim v0 v1 ... value` dump format.
//!
//! Run with `cargo run --example alpha_filtration`.

use psl::filtration::{build_alpha, delaunay_cells};
use psl::geometry::LabeledPointCloud;

fn main() -> psl::Result<()> {
    let s = 1.0 / 2f64.sqrt();
    let coords = [
        [1.0, 0.0, -s],
        [-1.0, 0.0, -s],
        [0.0, 1.0, s],
        [0.0, -1.0, s],
        [0.1, 0.05, 2.2],
    ];
    let cloud = LabeledPointCloud::from_coords(&coords, &[1.0; 5])?;

    let cells = delaunay_cells(&coords);
    println!("Delaunay: dimension {}, {} cells", cells.dim, cells.cells.len());
    for c in &cells.cells {
        println!("  {c:?}");
    }

    let fc = build_alpha(&cloud)?;
    println!(
        "\nalpha complex: {} vertices, {} edges, {} triangles",
        fc.count_dim(0),
        fc.count_dim(1),
        fc.count_dim(2)
    );
    print!("{}", fc.dump());
    Ok(())
}
