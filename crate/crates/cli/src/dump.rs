//! Plain-text mesh and matrix dumps.

use std::io::{self, Write};

use cylspec_core::geometry::BoundaryTag;
use cylspec_core::mesh::Mesh;
use cylspec_core::sparse::SparseSym;

use crate::record::fmt_g17;

/// Writes `nodes`, `elements` and `facets` sections, one record per line.
/// Facet lines are `tag face node...` with `face = -1` when untracked.
pub fn write_mesh(mesh: &Mesh, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "# cylspec mesh")?;
    writeln!(out, "dim {}", mesh.dim())?;
    writeln!(out, "kind {}", mesh.kind().name())?;
    writeln!(out, "nodes {}", mesh.num_nodes())?;
    for i in 0..mesh.num_nodes() {
        let c: Vec<String> = mesh.node(i).iter().map(|v| fmt_g17(*v)).collect();
        writeln!(out, "{}", c.join(" "))?;
    }
    writeln!(out, "elements {}", mesh.num_elements())?;
    for e in 0..mesh.num_elements() {
        let n: Vec<String> = mesh.element(e).iter().map(usize::to_string).collect();
        writeln!(out, "{}", n.join(" "))?;
    }
    writeln!(out, "facets {}", mesh.boundary_facets().len())?;
    for f in mesh.boundary_facets() {
        let tag = match f.tag {
            BoundaryTag::Dirichlet => "dirichlet",
            BoundaryTag::Neumann => "neumann",
        };
        let face = f.face_id.map(|i| i as i64).unwrap_or(-1);
        let n: Vec<String> = f.nodes.iter().map(usize::to_string).collect();
        writeln!(out, "{tag} {face} {}", n.join(" "))?;
    }
    Ok(())
}

/// Coordinate format `row col value` (0-based, lower triangle).
pub fn write_matrix(a: &SparseSym, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "# symmetric {} x {}, lower triangle, {} entries", a.n(), a.n(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{i} {j} {}", fmt_g17(v))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use cylspec_core::mesh::{mesh_box2, CellFamily};

    #[test]
    fn mesh_dump_has_all_sections() {
        let mesh = mesh_box2(0.0, 1.0, 0.0, 1.0, 2, 2, CellFamily::Simplex).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.contains("nodes 9\n") && s.contains("elements 8\n") && s.contains("facets 8\n"));
        assert_eq!(s.lines().count(), 1 + 2 + 1 + 9 + 1 + 8 + 1 + 8);
    }
}
