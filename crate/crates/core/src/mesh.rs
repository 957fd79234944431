//! Triangulated surfaces of revolution and Wavefront OBJ export.

use std::f64::consts::PI;
use std::io::{self, Write};

use crate::delaunay::{eval_state, DelaunayParams};
use crate::error::{Error, Result};
use crate::numerics::QuadratureConfig;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    /// One unit normal per vertex.
    pub normals: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    pub fn is_valid(&self) -> bool {
        self.vertices.len() == self.normals.len()
            && self
                .triangles
                .iter()
                .all(|t| t.iter().all(|&i| i < self.vertices.len()))
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }
}

/// Quad-strip grid closed in the angular direction. Vertex `(i, j)` has index
/// `i * n_parallel + j`; triangles are wound so that their geometric normal
/// agrees with `∂s × ∂θ`.
fn revolve_grid<F>(n_meridian: usize, n_parallel: usize, mut vertex: F) -> Result<TriangleMesh>
where
    F: FnMut(usize, f64) -> Result<([f64; 3], [f64; 3])>,
{
    let mut mesh = TriangleMesh::default();
    for i in 0..n_meridian {
        for j in 0..n_parallel {
            let theta = 2.0 * PI * j as f64 / n_parallel as f64;
            let (p, n) = vertex(i, theta)?;
            mesh.vertices.push(p);
            mesh.normals.push(n);
        }
    }
    let idx = |i: usize, j: usize| i * n_parallel + (j % n_parallel);
    for i in 0..n_meridian - 1 {
        for j in 0..n_parallel {
            mesh.triangles.push([idx(i, j), idx(i + 1, j), idx(i, j + 1)]);
            mesh.triangles
                .push([idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Ok(mesh)
}

/// Revolve the generatrix over `[s_min, s_max]` around the z-axis with
/// uniform arc-length spacing. Normals follow `(-z' cos θ, -z' sin θ, x')`.
pub fn revolve(
    params: &DelaunayParams,
    s_min: f64,
    s_max: f64,
    n_meridian: usize,
    n_parallel: usize,
    quad: &QuadratureConfig,
) -> Result<TriangleMesh> {
    if !(s_min < s_max) || !s_min.is_finite() || !s_max.is_finite() {
        return Err(Error::InvalidRange { lo: s_min, hi: s_max });
    }
    if n_meridian < 2 || n_parallel < 3 {
        return Err(Error::InvalidConfig(
            "a revolved mesh needs at least 2 meridian and 3 parallel samples",
        ));
    }
    let step = (s_max - s_min) / (n_meridian - 1) as f64;
    let mut row = usize::MAX;
    let mut st = None;
    revolve_grid(n_meridian, n_parallel, |i, theta| {
        if i != row {
            let s = if i == n_meridian - 1 { s_max } else { s_min + step * i as f64 };
            st = Some(eval_state(params, s, quad)?);
            row = i;
        }
        let st = st.expect("state for current row");
        let (sin, cos) = theta.sin_cos();
        Ok((
            [st.x * cos, st.x * sin, st.z],
            [-st.dz * cos, -st.dz * sin, st.dx],
        ))
    })
}

/// UV sphere of the given radius centred at the origin, outward normals.
pub fn sphere(radius: f64, n_meridian: usize, n_parallel: usize) -> Result<TriangleMesh> {
    if !(radius > 0.0) {
        return Err(Error::InvalidConfig("sphere radius must be positive"));
    }
    if n_meridian < 3 || n_parallel < 3 {
        return Err(Error::InvalidConfig(
            "a sphere mesh needs at least 3 meridian and 3 parallel samples",
        ));
    }
    // Polar angle measured from the north pole, so ∂φ × ∂θ points outward.
    revolve_grid(n_meridian, n_parallel, |i, theta| {
        let phi = PI * i as f64 / (n_meridian - 1) as f64;
        let (sp, cp) = phi.sin_cos();
        let (st, ct) = theta.sin_cos();
        let n = [sp * ct, sp * st, cp];
        Ok(([radius * n[0], radius * n[1], radius * n[2]], n))
    })
}

/// Format with 9 significant digits in plain decimal notation.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0".to_string() } else { v.to_string() };
    }
    let sci = format!("{:.8e}", v);
    let rounded: f64 = sci.parse().expect("round-trip of formatted float");
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .expect("exponent");
    let decimals = (8 - exp).max(0) as usize;
    let out = format!("{:.*}", decimals, rounded);
    if out.parse::<f64>() == Ok(0.0) {
        "0".to_string()
    } else {
        out
    }
}

/// Write one or more named meshes as Wavefront OBJ objects. Indices are
/// 1-based and shared between positions and normals (`f a//a b//b c//c`).
pub fn export_obj_objects<W: Write>(objects: &[(&str, &TriangleMesh)], out: &mut W) -> io::Result<()> {
    let mut offset = 0;
    for (name, mesh) in objects {
        if objects.len() > 1 {
            writeln!(out, "o {name}")?;
        }
        for v in &mesh.vertices {
            writeln!(out, "v {} {} {}", format_sig9(v[0]), format_sig9(v[1]), format_sig9(v[2]))?;
        }
        for n in &mesh.normals {
            writeln!(out, "vn {} {} {}", format_sig9(n[0]), format_sig9(n[1]), format_sig9(n[2]))?;
        }
        for t in &mesh.triangles {
            let [a, b, c] = t.map(|i| i + 1 + offset);
            writeln!(out, "f {a}//{a} {b}//{b} {c}//{c}")?;
        }
        offset += mesh.vertices.len();
    }
    Ok(())
}

pub fn export_obj<W: Write>(mesh: &TriangleMesh, out: &mut W) -> io::Result<()> {
    export_obj_objects(&[("surface", mesh)], out)
}

/// Read back the subset of OBJ written by [`export_obj_objects`]: `v`, `vn`
/// and `f a//a ...` records. Objects are merged into one mesh.
pub fn parse_obj(text: &str) -> std::result::Result<TriangleMesh, String> {
    let mut mesh = TriangleMesh::default();
    let triple = |fields: &[&str], line: usize| -> std::result::Result<[f64; 3], String> {
        if fields.len() != 3 {
            return Err(format!("line {line}: expected 3 coordinates"));
        }
        let mut out = [0.0; 3];
        for (o, f) in out.iter_mut().zip(fields) {
            *o = f.parse().map_err(|e| format!("line {line}: {e}"))?;
        }
        Ok(out)
    };
    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let mut it = raw.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let rest: Vec<&str> = it.collect();
        match tag {
            "v" => mesh.vertices.push(triple(&rest, line)?),
            "vn" => mesh.normals.push(triple(&rest, line)?),
            "f" => {
                if rest.len() != 3 {
                    return Err(format!("line {line}: only triangles are supported"));
                }
                let mut tri = [0; 3];
                for (t, f) in tri.iter_mut().zip(&rest) {
                    let idx = f.split('/').next().unwrap_or_default();
                    let i: usize = idx.parse().map_err(|e| format!("line {line}: {e}"))?;
                    if i == 0 {
                        return Err(format!("line {line}: OBJ indices are 1-based"));
                    }
                    *t = i - 1;
                }
                mesh.triangles.push(tri);
            }
            "o" | "g" | "#" => {}
            other => return Err(format!("line {line}: unsupported record {other:?}")),
        }
    }
    if !mesh.is_valid() {
        return Err("face index out of range or normal count mismatch".into());
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(1.0), "1.00000000");
        assert_eq!(format_sig9(-2.5), "-2.50000000");
        assert_eq!(format_sig9(123456.789012), "123456.789");
        assert_eq!(format_sig9(0.00012345678912), "0.000123456789");
        assert_eq!(format_sig9(0.0), "0");
        assert_eq!(format_sig9(-0.0), "0");
        assert_eq!(format_sig9(9.999999999), "10.0000000");
    }

    #[test]
    fn single_triangle_export() {
        let mesh = TriangleMesh {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            normals: vec![[0.0, 0.0, 1.0]; 3],
            triangles: vec![[0, 1, 2]],
        };
        let mut buf = Vec::new();
        export_obj(&mesh, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let count = |p: &str| text.lines().filter(|l| l.starts_with(p)).count();
        assert_eq!(count("v "), 3);
        assert_eq!(count("vn "), 3);
        assert_eq!(count("f "), 1);
        assert!(text.contains("f 1//1 2//2 3//3\n"));
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn cylinder_band() {
        let p = DelaunayParams::new(1.0, 0.0).unwrap();
        let mesh = revolve(&p, 0.0, 1.0, 2, 4, &QuadratureConfig::default()).unwrap();
        assert_eq!(mesh.vertices.len(), 8);
        for v in &mesh.vertices {
            assert!((v[0].hypot(v[1]) - 1.0).abs() < 1e-15);
        }
        assert_eq!(mesh.euler_characteristic(), 0);
        assert!(mesh.is_valid());
    }

    #[test]
    fn rejects_bad_ranges() {
        let p = DelaunayParams::new(1.0, 0.5).unwrap();
        let q = QuadratureConfig::default();
        assert!(matches!(revolve(&p, 1.0, 1.0, 4, 4, &q), Err(Error::InvalidRange { .. })));
        assert!(revolve(&p, 0.0, 1.0, 1, 4, &q).is_err());
        assert!(revolve(&p, 0.0, 1.0, 4, 2, &q).is_err());
    }

    #[test]
    fn sphere_has_outward_winding() {
        let m = sphere(2.0, 9, 12).unwrap();
        for t in &m.triangles {
            let [a, b, c] = t.map(|i| m.vertices[i]);
            let e1 = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let e2 = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let n = [
                e1[1] * e2[2] - e1[2] * e2[1],
                e1[2] * e2[0] - e1[0] * e2[2],
                e1[0] * e2[1] - e1[1] * e2[0],
            ];
            let centroid: f64 = (0..3).map(|k| (a[k] + b[k] + c[k]) * n[k]).sum();
            assert!(centroid >= -1e-12);
        }
    }
}
