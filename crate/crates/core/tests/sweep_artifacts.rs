use lcp_core::bench::sweep::{artifact_graph_path, artifact_partition_path};
use lcp_core::bench::{run_sweep, write_csv, Method, SweepConfig};
use lcp_core::graph::{read_edge_list, read_partition};
use lcp_core::modularity;

fn config() -> SweepConfig {
    SweepConfig {
        n: 120,
        c: 3,
        gaps: vec![6.0, 12.0, 18.0],
        repetitions: 3,
        methods: vec![Method::Lcp, Method::LcpN, Method::Louvain, Method::Newman, Method::Nbt],
        timing: false,
        ..Default::default()
    }
}

fn csv_in_pool(cfg: &SweepConfig, threads: usize) -> Vec<u8> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let rows = pool.install(|| run_sweep(cfg)).unwrap();
    let mut out = Vec::new();
    write_csv(&rows, &mut out).unwrap();
    out
}

#[test]
fn persisted_partitions_reproduce_reported_modularity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig {
        artifacts: Some(dir.path().to_path_buf()),
        ..config()
    };
    let rows = run_sweep(&cfg).unwrap();
    let mut checked = 0;
    for row in &rows {
        let Some(reported) = row.modularity_est else {
            assert!(row.method.count_only() || row.estimated_c.is_none());
            continue;
        };
        let gi = cfg.gaps.iter().position(|&g| g == row.gap).unwrap();
        let g = read_edge_list(artifact_graph_path(dir.path(), gi, row.rep)).unwrap();
        let p = read_partition(artifact_partition_path(dir.path(), gi, row.rep, row.method)).unwrap();
        assert!((modularity(&g, &p).unwrap() - reported).abs() <= 1e-12, "{row:?}");
        checked += 1;
    }
    assert_eq!(checked, 4 * 3 * 3);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let cfg = config();
    let one = csv_in_pool(&cfg, 1);
    assert_eq!(one, csv_in_pool(&cfg, 4));
    assert_eq!(one, csv_in_pool(&cfg, 1));
}
