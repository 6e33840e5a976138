use extrema_core::embedding::{embed_profile, tessellate, TriangleMesh};
use extrema_core::io::*;
use extrema_core::kernels::make_random_wave;
use extrema_core::Error;
use proptest::prelude::*;

#[test]
fn empty_table_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    write_csv(&path, &Table::new(&["bin_center", "mean", "stderr", "n"])).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "bin_center,mean,stderr,n\n");
    let back = read_csv(&path).unwrap();
    assert!(back.rows.is_empty());
    assert_eq!(back.headers.len(), 4);
}

#[test]
fn mesh_round_trip_is_bit_exact() {
    let k = make_random_wave(1.0).unwrap();
    let grid: Vec<f64> = (0..=40).map(|i| 0.15 * i as f64).collect();
    let mesh = tessellate(&embed_profile(&k, &grid).unwrap(), 12, 0.25).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.obj");
    write_obj(&path, &mesh).unwrap();
    let (v, t) = read_obj(&path).unwrap();
    assert_eq!(t, mesh.triangles);
    assert_eq!(v.len(), mesh.vertices.len());
    for (a, b) in v.iter().zip(&mesh.vertices) {
        for i in 0..3 {
            assert_eq!(a[i].to_bits(), b[i].to_bits());
        }
    }
}

#[test]
fn vertices_only_obj() {
    let mesh = TriangleMesh {
        vertices: vec![[0.0, 1.0, 2.0], [3.0, 4.0, 5.5]],
        triangles: vec![],
        meridian_y: vec![],
        gridline_step: 1.0,
        rings: vec![],
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.obj");
    write_obj(&path, &mesh).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.starts_with("v ")));
    let (v, t) = read_obj(&path).unwrap();
    assert_eq!(v, mesh.vertices);
    assert!(t.is_empty());
}

#[test]
fn errors_carry_the_path() {
    let path = std::path::Path::new("/nonexistent-dir/sub/out.csv");
    let err = write_csv(path, &Table::new(&["a"])).unwrap_err();
    assert!(matches!(err, Error::Csv { .. }));
    assert!(err.to_string().contains("/nonexistent-dir/sub/out.csv"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.obj");
    std::fs::write(&bad, "v 0 0 0\nf 1 2 3\n").unwrap();
    assert!(matches!(read_obj(&bad), Err(Error::Parse { .. })));
}

proptest! {
    #[test]
    fn csv_values_round_trip(values in proptest::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut table = Table::new(&["x"]);
        for v in &values {
            table.push_numbers(&[*v]).unwrap();
        }
        write_csv(&path, &table).unwrap();
        let back = read_csv(&path).unwrap().column_f64("x").unwrap();
        prop_assert_eq!(back.len(), values.len());
        for (a, b) in back.iter().zip(&values) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}
