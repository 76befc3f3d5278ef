//! Acceptance suite. Runs every criterion in order, prints one line per
//! criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use cluster_braid::coxeter::{CoxeterContext, CoxeterType};
use cluster_braid::exchange::{build_ceg, enumerate_polygons, face_counts, h1_of, isomorphic, ExchangeGraph, DEFAULT_BUDGET};
use cluster_braid::folding::{catalog, Folding};
use cluster_braid::garside::Garside;
use cluster_braid::quiver::Seed;
use cluster_braid::verify::{
    build_twist_labeling, pattern_coverage, random_sequences, verify_diagram, verify_garside_engine, verify_iota,
    verify_lem_surj, verify_local_twist_decomposition, verify_presentations, verify_theta_invariance,
};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 42;
const THETA_SAMPLES: usize = 100;
const THETA_MAX_LEN: usize = 8;
const LABEL_RADIUS: usize = 6;
const DIAGRAM_VERTICES: usize = 10;
const GARSIDE_CASES: usize = 1000;
const IOTA_BOUND: usize = 100_000;

type Outcome = Result<String, String>;

fn t(label: &str) -> CoxeterType {
    label.parse().expect("type label")
}

fn ceg(f: &Arc<Folding>) -> ExchangeGraph {
    build_ceg(Seed::initial(f.clone(), None).expect("initial seed"), DEFAULT_BUDGET).expect("exchange graph")
}

fn garside(ty: CoxeterType) -> Garside {
    Garside::new(CoxeterContext::from_type(ty).expect("finite type"))
}

/// Every catalog folding used by the folding-level criteria.
fn all_foldings() -> Vec<Arc<Folding>> {
    let mut types: Vec<CoxeterType> =
        ["A3", "A4", "D4", "E6", "B2", "B3", "B4", "F4", "G2", "H2", "H3", "H4"].iter().map(|s| t(s)).collect();
    types.extend((3..=12).map(CoxeterType::I2));
    types.into_iter().flat_map(catalog).collect()
}

fn criterion_1() -> Outcome {
    let mut sizes = Vec::new();
    for m in 3..=12u32 {
        let foldings = catalog(CoxeterType::I2(m));
        let graphs: Vec<ExchangeGraph> = foldings.iter().map(ceg).collect();
        for (f, g) in foldings.iter().zip(&graphs) {
            let n = g.num_vertices();
            let adj = g.adjacency();
            let two_regular = adj.iter().all(|a| a.len() == 2);
            let connected = g.distances().iter().all(|&d| d != usize::MAX);
            if n != m as usize + 2 || !two_regular || !connected || g.num_edges() != n {
                return Err(format!("I2({}) via {}: {} vertices, {} edges", m, f.source_type(), n, g.num_edges()));
            }
        }
        for g in &graphs[1..] {
            if !isomorphic(&graphs[0], g) {
                return Err(format!("I2({}): unfoldings give non-isomorphic graphs", m));
            }
        }
        sizes.push(format!("{}x{}", m + 2, graphs.len()));
    }
    Ok(format!("(m+2)-cycles for m=3..12, unfoldings per m: {}", sizes.join(" ")))
}

/// Exponents typed in by hand, and the product formula over them.
fn catalan_number(label: &str) -> u64 {
    let (e, h): (Vec<u64>, u64) = match label {
        "A3" => (vec![1, 2, 3], 4),
        "A4" => (vec![1, 2, 3, 4], 5),
        "B3" => (vec![1, 3, 5], 6),
        "B4" => (vec![1, 3, 5, 7], 8),
        "D4" => (vec![1, 3, 3, 5], 6),
        "F4" => (vec![1, 5, 7, 11], 12),
        "G2" => (vec![1, 5], 6),
        "H3" => (vec![1, 5, 9], 10),
        "H4" => (vec![1, 11, 19, 29], 30),
        _ => unreachable!("no exponents for {}", label),
    };
    e.iter().map(|x| x + h + 1).product::<u64>() / e.iter().map(|x| x + 1).product::<u64>()
}

fn criterion_2() -> Outcome {
    let expected = [("A3", 14), ("A4", 42), ("B3", 20), ("B4", 70), ("D4", 50), ("F4", 105), ("G2", 8), ("H3", 32), ("H4", 280)];
    let mut got = Vec::new();
    for (label, want) in expected {
        if catalan_number(label) != want as u64 {
            return Err(format!("{}: product formula gives {}, expected {}", label, catalan_number(label), want));
        }
        for f in catalog(t(label)) {
            let n = ceg(&f).num_vertices();
            if n != want {
                return Err(format!("{} via {}: {} vertices, expected {}", label, f.source_type(), n, want));
            }
        }
        got.push(format!("{}={}", label, want));
    }
    Ok(format!("{} (all catalog unfoldings, equal to the product formula)", got.join(" ")))
}

fn criterion_3() -> Outcome {
    // (type, largest polygon size, count of largest, count of the rest)
    let expected = [("A3", 5, 6, 3), ("B3", 6, 4, 8), ("H3", 7, 6, 12)];
    let mut out = Vec::new();
    for (label, big, n_big, n_rest) in expected {
        for f in catalog(t(label)) {
            let g = ceg(&f);
            let polys = enumerate_polygons(&g).map_err(|e| e.to_string())?;
            for p in &polys {
                let m = p.m as usize;
                if p.vertices.len() != m + 2 {
                    return Err(format!("{}: polygon of size {} has m = {}", label, p.vertices.len(), m));
                }
            }
            let counts: BTreeMap<usize, usize> = face_counts(&polys).into_iter().map(|(m, c)| (m as usize + 2, c)).collect();
            let got_big = counts.get(&big).copied().unwrap_or(0);
            let got_rest: usize = counts.iter().filter(|(&s, _)| s != big).map(|(_, &c)| c).sum();
            let max_size = counts.keys().max().copied().unwrap_or(0);
            if got_big != n_big || got_rest != n_rest || max_size != big {
                return Err(format!("{} via {}: polygon sizes {:?}", label, f.source_type(), counts));
            }
            out.push(format!("{}:{:?}", label, counts));
        }
    }
    out.dedup();
    Ok(format!("polygon sizes {}", out.join(" ")))
}

fn criterion_4() -> Outcome {
    for m in 2..=30 {
        let rep = verify_lem_surj(m).map_err(|e| e.to_string())?;
        if !rep.passed() {
            return Err(rep.to_text());
        }
    }
    Ok("closed forms and Br^m(t1,t2) for m=2..30".into())
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut foldings: Vec<Arc<Folding>> =
        ["A3", "A4", "B3", "B4", "D4", "F4", "G2", "H3", "H4"].iter().map(|s| catalog(t(s))[0].clone()).collect();
    foldings.extend((3..=8).map(|m| catalog(CoxeterType::I2(m))[0].clone()));
    let mut total = 0;
    for f in &foldings {
        let g = garside(f.target_type());
        let mut seqs = random_sequences(&mut rng, f.target().rank(), THETA_SAMPLES, THETA_MAX_LEN);
        seqs.push(Vec::new());
        let rep = verify_theta_invariance(f, &seqs, &g).map_err(|e| format!("{}: {}", f.label(), e))?;
        if !rep.passed() {
            return Err(format!("{}: {}", f.label(), rep.to_text()));
        }
        total += seqs.len();
    }
    Ok(format!("{} sequences over {} types, seed {}", total, foldings.len(), SEED))
}

fn criterion_6() -> Outcome {
    let mut runs: Vec<(CoxeterType, Option<usize>)> =
        ["A3", "B3", "G2", "H3"].iter().map(|s| (t(s), None)).collect();
    runs.extend((3..=12).map(|m| (CoxeterType::I2(m), None)));
    runs.push((t("H4"), Some(LABEL_RADIUS)));
    runs.push((t("F4"), Some(LABEL_RADIUS)));
    let mut coverage = [0usize; 4];
    let mut labelled = 0;
    for (ty, radius) in runs {
        let f = catalog(ty)[0].clone();
        let g = ceg(&f);
        let gd = garside(f.target_type());
        let lab = build_twist_labeling(&g, &gd, radius).map_err(|e| format!("{}: {}", ty, e))?;
        if radius.is_none() && lab.labelled().count() != g.num_vertices() {
            return Err(format!("{}: labelling does not cover the graph", ty));
        }
        let rep = verify_presentations(&g, &lab, &gd).map_err(|e| format!("{}: {}", ty, e))?;
        if !rep.passed() {
            return Err(format!("{}: {}", ty, rep.to_text()));
        }
        for (c, k) in coverage.iter_mut().zip(pattern_coverage(&rep)) {
            *c += k;
        }
        labelled += lab.labelled().count();
    }
    if coverage.contains(&0) {
        return Err(format!("pattern coverage I-IV = {:?}", coverage));
    }
    Ok(format!("{} labelled vertices, pattern coverage I-IV = {:?}", labelled, coverage))
}

fn criterion_7() -> Outcome {
    let expected: BTreeMap<&str, usize> =
        [("H3:D6", 120), ("H4:E8", 14400), ("G2:D4", 12), ("F4:E6", 1152), ("B3:D4", 48)].into_iter().collect();
    let mut seen = Vec::new();
    for f in all_foldings() {
        let gl = garside(f.source_type());
        let local = verify_local_twist_decomposition(&f, &gl).map_err(|e| e.to_string())?;
        let rep = verify_iota(&f, &gl, IOTA_BOUND).map_err(|e| format!("{}: {}", f.label(), e))?;
        if !rep.passed() || !local.passed() {
            return Err(format!("{}: {}{}", f.label(), rep.to_text(), local.to_text()));
        }
        let images = rep.stats["distinct_images"].as_u64().unwrap() as usize;
        if let Some(&want) = expected.get(f.label().as_str()) {
            if images != want {
                return Err(format!("{}: {} distinct images, expected {}", f.label(), images, want));
            }
            seen.push(format!("{}={}", f.label(), images));
        }
    }
    if seen.len() != expected.len() {
        return Err(format!("missing catalog foldings, saw {:?}", seen));
    }
    Ok(format!("all catalog foldings; {}", seen.join(" ")))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    let foldings = all_foldings();
    for f in &foldings {
        let g = ceg(f);
        let nv = g.num_vertices();
        let mut vertices = vec![g.initial()];
        vertices.extend(sample(&mut rng, nv, DIAGRAM_VERTICES.min(nv)).into_iter().filter(|&v| v != g.initial()));
        let dist = g.distances();
        let radius = vertices.iter().map(|&v| dist[v]).max();
        let gd = garside(f.target_type());
        let gl = garside(f.source_type());
        let lab = build_twist_labeling(&g, &gd, radius).map_err(|e| format!("{}: {}", f.label(), e))?;
        let rep = verify_diagram(&g, &lab, &vertices, &gl).map_err(|e| format!("{}: {}", f.label(), e))?;
        if !rep.passed() {
            return Err(format!("{}: {}", f.label(), rep.to_text()));
        }
        checked += vertices.len();
    }
    Ok(format!("{} vertices over {} catalog foldings, seed {}", checked, foldings.len(), SEED))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for f in all_foldings() {
        let g = ceg(&f);
        let polys = enumerate_polygons(&g).map_err(|e| e.to_string())?;
        let h1 = h1_of(&g, &polys);
        if !h1.is_empty() {
            return Err(format!("{}: H1 invariant factors {:?}", f.label(), h1));
        }
        count += 1;
    }
    Ok(format!("H1 trivial for {} exchange graphs", count))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let types = ["A3", "A4", "B3", "B4", "D4", "E6", "F4", "G2", "H3", "H4", "I2:5", "I2:7"];
    for label in types {
        let rep = verify_garside_engine(&garside(t(label)), GARSIDE_CASES, &mut rng).map_err(|e| e.to_string())?;
        if !rep.passed() {
            return Err(rep.to_text());
        }
    }
    Ok(format!("{} cases per property for {} types", GARSIDE_CASES, types.len()))
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (n, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS [{:.1}s] {}", n, secs, detail),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL [{:.1}s] {}", n, secs, detail);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", failed);
        ExitCode::FAILURE
    }
}
