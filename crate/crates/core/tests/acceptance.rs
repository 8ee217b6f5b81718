//! End-to-end checks at desk scale. Runs without the libtest harness so
//! every check prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use genus_vd::boundaried::genus_min_merge;
use genus_vd::boundaried::BoundariedEmbedding;
use genus_vd::cli::graph_genus;
use genus_vd::dp::{self, DpOptions};
use genus_vd::flag::{fixtures, Embedding, ObjectKind};
use genus_vd::generators::{
    b_ell, b_ell_decomposition, complete, complete_bipartite, random_connected,
};
use genus_vd::nicify::{
    canonical_key, canonical_key_plain, enumerate_nice, is_nice, make_nice, EnumLimits,
};
use genus_vd::ops::{delete_edge, draw_edge, position};
use genus_vd::oracle::{brute_force_gvd, exact_genus};
use genus_vd::treedecomp::{heuristic_td, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn oracle_equivalence() -> Outcome {
    let mut graphs: Vec<Graph> = (1..=5).flat_map(common::connected_graphs).collect();
    if graphs.len() != 31 {
        return Err(format!(
            "expected 31 small connected graphs, got {}",
            graphs.len()
        ));
    }
    graphs.push(complete_bipartite(3, 3));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for i in 0..200 {
        let n = rng.gen_range(2..=6);
        let m = rng.gen_range(n - 1..=(n * (n - 1) / 2).min(9));
        graphs.push(random_connected(n, m, 1000 + i).map_err(|e| e.to_string())?);
    }
    let mut checked = 0;
    for g in &graphs {
        for genus in 0..=2 {
            for k in 0..=2 {
                let v = dp::solve_graph(g, None, k, &DpOptions::new(genus, false))
                    .map_err(|e| e.to_string())?;
                let o = brute_force_gvd(g, genus, k, false).map_err(|e| e.to_string())?;
                let expect_min = o;
                let got = if v.yes { v.min } else { None };
                if got != expect_min {
                    return Err(format!(
                        "g={genus} k={k} on {:?}: table {:?}, oracle {:?}",
                        g.edges(),
                        got,
                        expect_min
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{} graphs, {checked} instances agree",
        graphs.len()
    ))
}

fn cli_genus(g: &Graph, orientable: bool) -> Result<usize, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("g.gr");
    std::fs::write(&path, g.to_gr()).map_err(|e| e.to_string())?;
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gvd"));
    cmd.arg("genus").arg("--graph").arg(&path);
    if orientable {
        cmd.arg("--orientable");
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    text.trim()
        .strip_prefix("genus ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("unexpected output {text:?}"))
}

fn named_genus_values() -> Outcome {
    let cases = [
        ("K5", complete(5), false, 1),
        ("K3,3", complete_bipartite(3, 3), false, 1),
        ("K4", complete(4), false, 0),
        ("K5 orientable", complete(5), true, 2),
    ];
    let mut parts = Vec::new();
    for (name, g, orientable, want) in cases {
        let o = exact_genus(&g, orientable).map_err(|e| e.to_string())?;
        let d = graph_genus(&g, None, orientable).map_err(|e| e.to_string())?;
        let c = cli_genus(&g, orientable)?;
        if (o, d, c) != (want, want, want) {
            return Err(format!(
                "{name}: oracle {o}, table {d}, cli {c}, expected {want}"
            ));
        }
        parts.push(format!("{name}={want}"));
    }
    Ok(parts.join(" "))
}

fn nice_size_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut largest = 0;
    for i in 0..1000 {
        let e = common::random_boundaried(&mut rng, 20, 4, 4);
        let t = e.label_range().len();
        let n = make_nice(&e);
        let g = n.embedding().euler_genus();
        let bound = 48 * t + 24 * g;
        if n.flag_count() > bound {
            return Err(format!("sample {i}: {} flags > {bound}", n.flag_count()));
        }
        if !is_nice(&n) {
            return Err(format!("sample {i}: output not nice"));
        }
        largest = largest.max(n.flag_count());
    }
    Ok(format!("1000 samples, largest output {largest} flags"))
}

fn equivalence_preserved() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut shrunk = 0;
    for i in 0..300 {
        let e = common::random_boundaried(&mut rng, 12, 3, 3);
        let p = common::random_boundaried(&mut rng, 12, 3, 3);
        let n = make_nice(&e);
        if n.flag_count() < e.flag_count() {
            shrunk += 1;
        }
        let a = genus_min_merge(&e, &p).map_err(|x| x.to_string())?;
        let b = genus_min_merge(&n, &p).map_err(|x| x.to_string())?;
        if a != b {
            return Err(format!(
                "pair {i}: {a} before, {b} after simplification\n{e}\n{p}"
            ));
        }
    }
    Ok(format!("300 pairs, {shrunk} simplified"))
}

fn edge_condition(e: &Embedding, x: usize) -> (bool, bool) {
    let faces = e.faces();
    let f = genus_vd::ops::edge_flags(e, x);
    let two_faces = f.iter().any(|&a| faces.orbit_of(a) != faces.orbit_of(f[0]));
    let small = f
        .iter()
        .any(|&a| e.orbit_walk(ObjectKind::Vertex, a).len() == 2);
    (two_faces, small)
}

fn deletion_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut edges_checked = 0;
    for i in 0..2000 {
        let e = common::random_embedding(&mut rng, 24);
        if e.hypergraph_genus() < 0 || e.hypergraph_genus() as usize != e.euler_genus() {
            return Err(format!("sample {i}: genus formula disagrees"));
        }
        let g = e.euler_genus() as i64;
        let key = canonical_key_plain(&e);
        for orbit in e.edges().iter() {
            let x = orbit[0];
            let d = delete_edge(&e, x).map_err(|x| x.to_string())?;
            let drop = g - d.embedding.euler_genus() as i64;
            if !(0..=2).contains(&drop) {
                return Err(format!("sample {i} edge {x}: genus drop {drop}"));
            }
            let (two_faces, small) = edge_condition(&e, x);
            if (two_faces || small) && drop != 0 {
                return Err(format!(
                    "sample {i} edge {x}: drop {drop} on a neutral edge"
                ));
            }
            let pos = position(&e, x)
                .map_err(|x| x.to_string())?
                .renamed(&d.renaming);
            let back = draw_edge(&d.embedding, pos).map_err(|x| x.to_string())?;
            if canonical_key_plain(&back.embedding) != key {
                return Err(format!("sample {i} edge {x}: redraw differs\n{e}"));
            }
            edges_checked += 1;
        }
    }
    Ok(format!("2000 embeddings, {edges_checked} edges"))
}

fn b_ell_fixture() -> Outcome {
    let b2 = b_ell(2).map_err(|e| e.to_string())?;
    let td = b_ell_decomposition(2);
    let start = Instant::now();
    let v =
        dp::solve_graph(&b2, Some(&td), 0, &DpOptions::new(0, false)).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    if v.yes {
        return Err("b_ell(2) reported planar".into());
    }
    if took > Duration::from_secs(600) {
        return Err(format!("table computation took {took:?}"));
    }
    let b1 = b_ell(1).map_err(|e| e.to_string())?;
    let g1 = exact_genus(&b1, false).map_err(|e| e.to_string())?;
    if g1 < 1 {
        return Err(format!(
            "b_ell(2) NO at width {} in {took:.2?}, but oracle gives exact_genus(b_ell(1)) = {g1}",
            td.width()
        ));
    }
    Ok(format!(
        "b_ell(2) NO at width {} in {took:.2?}; b_ell(1) genus {g1}",
        td.width()
    ))
}

fn enumeration_sanity() -> Outcome {
    let limits = EnumLimits::default();
    let zero = enumerate_nice(0, 0, false, limits).map_err(|e| e.to_string())?;
    let empty = canonical_key(&BoundariedEmbedding::empty(0));
    if zero.len() != 1 || !zero.contains_key(&empty) {
        return Err(format!("enumerate_nice(0,0) has {} members", zero.len()));
    }
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| enumerate_nice(0, 1, false, limits))
            .map_err(|e| e.to_string())
    };
    let one = run(1)?;
    let again = run(1)?;
    let wide = run(4)?;
    if one.keys().ne(again.keys()) || one.keys().ne(wide.keys()) {
        return Err(format!(
            "runs differ: {} / {} / {}",
            one.len(),
            again.len(),
            wide.len()
        ));
    }
    let loop_key = canonical_key(&BoundariedEmbedding::unlabelled(
        fixtures::projective_loop(),
        0,
    ));
    if !one.contains_key(&loop_key) {
        return Err("projective loop missing".into());
    }
    for (k, b) in zero.iter().chain(one.iter()) {
        if !is_nice(b) || b.genus() > 1 || canonical_key(b) != *k {
            return Err(format!("bad member\n{b}"));
        }
    }
    Ok(format!("counts 1 and {}", one.len()))
}

fn scaling_smoke() -> Outcome {
    let (seed, g, td) = (0..1000u64)
        .find_map(|s| {
            let g = random_connected(20, 25, s).ok()?;
            let td = heuristic_td(&g);
            (td.width() <= 3).then_some((s, g, td))
        })
        .ok_or("no seed below 1000 gives width <= 3")?;
    let start = Instant::now();
    let mut answers = Vec::new();
    for genus in 0..=1 {
        for k in 0..=2 {
            let v = dp::solve_graph(&g, Some(&td), k, &DpOptions::new(genus, false))
                .map_err(|e| e.to_string())?;
            if v.yes {
                let w = v.witness.clone().ok_or("YES without witness")?;
                if w.len() > k {
                    return Err(format!("witness {w:?} over budget {k}"));
                }
                // scheme ceiling 0 forces the re-run of the table computation
                if !dp::verify_witness(&g, &w, genus, false, 0).map_err(|e| e.to_string())? {
                    return Err(format!("witness {w:?} fails at g={genus}"));
                }
            }
            answers.push(if v.yes { 'Y' } else { 'N' });
        }
    }
    let took = start.elapsed();
    if took > Duration::from_secs(900) {
        return Err(format!("took {took:?}"));
    }
    Ok(format!(
        "seed {seed}, width {}, answers {}, {took:.2?}",
        td.width(),
        answers.iter().collect::<String>()
    ))
}

fn main() -> ExitCode {
    let checks: [Check; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("named genus values", named_genus_values),
        ("nice size bound", nice_size_bound),
        (
            "equivalence preserved by simplification",
            equivalence_preserved,
        ),
        ("deletion and redraw properties", deletion_properties),
        ("b_ell fixture", b_ell_fixture),
        ("nice enumeration", enumeration_sanity),
        ("scaling smoke test", scaling_smoke),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, f)) in checks.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let r = f();
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("{} PASS {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("{} FAIL {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
