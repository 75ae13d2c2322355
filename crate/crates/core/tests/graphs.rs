use rand::seq::SliceRandom;
use rand::Rng;
use skeletron::generate::{self, rng_from_seed};
use skeletron::metric_graph::{Edge, MetricGraph, Ray, Vertex};
use skeletron::rational::{int, rat};
use skeletron::stable::{is_stable, stabilize, terminal_forms};

/// The same graph with vertices renamed, edges reversed and shuffled.
fn relabel<R: Rng>(rng: &mut R, g: &MetricGraph) -> MetricGraph {
    let mut names: Vec<usize> = (0..g.vertices().len()).collect();
    names.shuffle(rng);
    let rename = |id: &str| {
        let i = g.vertices().iter().position(|v| v.id == id).unwrap();
        format!("q{}", names[i])
    };
    let vertices = g
        .vertices()
        .iter()
        .map(|v| Vertex {
            id: rename(&v.id),
            weight: v.weight,
        })
        .collect();
    let mut edges: Vec<Edge> = g
        .edges()
        .iter()
        .map(|e| {
            if rng.random_bool(0.5) {
                Edge::new(rename(&e.v), rename(&e.u), e.length.clone())
            } else {
                Edge::new(rename(&e.u), rename(&e.v), e.length.clone())
            }
        })
        .collect();
    edges.shuffle(rng);
    let rays = g.rays().iter().map(|r| Ray::new(rename(&r.base), r.mark.clone())).collect();
    MetricGraph::new(vertices, edges, rays).unwrap()
}

#[test]
fn refinement_preserves_invariants() {
    let mut rng = rng_from_seed(51);
    for _ in 0..200 {
        let g = generate::metric_graph(&mut rng, 6, 4);
        if g.edges().is_empty() {
            continue;
        }
        let mut h = g.clone();
        for _ in 0..10 {
            let i = rng.random_range(0..h.edges().len());
            let pos = &h.edges()[i].length * rat(rng.random_range(1..6), 6);
            h = h.refine(i, &pos).unwrap();
        }
        assert_eq!(h.betti1(), g.betti1());
        assert_eq!(h.total_genus(), g.total_genus());
        assert_eq!(h.euler_char(), g.euler_char());
        for u in g.vertices() {
            for v in g.vertices() {
                assert_eq!(h.shortest_path(&u.id, &v.id).unwrap(), g.shortest_path(&u.id, &v.id).unwrap());
            }
        }
        if g.euler_char() < 0 && h.vertices().len() <= 12 {
            let (a, b) = (stabilize(&g).unwrap().output, stabilize(&h).unwrap().output);
            assert!(a.is_isomorphic(&b).unwrap());
        }
    }
}

#[test]
fn isomorphism_is_an_equivalence() {
    let mut rng = rng_from_seed(53);
    let graphs: Vec<MetricGraph> = (0..60).map(|_| generate::metric_graph(&mut rng, 5, 3)).collect();
    for g in &graphs {
        assert!(g.is_isomorphic(g).unwrap());
        let h = relabel(&mut rng, g);
        let k = relabel(&mut rng, &h);
        assert!(g.is_isomorphic(&h).unwrap());
        assert!(h.is_isomorphic(g).unwrap());
        assert!(h.is_isomorphic(&k).unwrap());
        assert!(g.is_isomorphic(&k).unwrap());
    }
    for a in &graphs {
        for b in &graphs {
            assert_eq!(a.is_isomorphic(b).unwrap(), b.is_isomorphic(a).unwrap());
        }
    }
}

#[test]
fn changing_a_length_breaks_isomorphism() {
    let g = MetricGraph::new(
        vec![Vertex { id: "a".into(), weight: 0 }, Vertex { id: "b".into(), weight: 0 }],
        vec![
            Edge::new("a", "b", int(1)),
            Edge::new("a", "b", int(2)),
            Edge::new("a", "b", int(3)),
        ],
        vec![],
    )
    .unwrap();
    let h = MetricGraph::new(
        g.vertices().to_vec(),
        vec![
            Edge::new("b", "a", int(3)),
            Edge::new("a", "b", int(1)),
            Edge::new("a", "b", rat(5, 2)),
        ],
        vec![],
    )
    .unwrap();
    assert!(!g.is_isomorphic(&h).unwrap());
}

#[test]
fn random_graphs_stabilize_confluently() {
    let mut rng = rng_from_seed(57);
    let mut tested = 0;
    while tested < 300 {
        let g = generate::metric_graph(&mut rng, 6, 3);
        if g.euler_char() >= 0 {
            assert!(stabilize(&g).is_err());
            continue;
        }
        tested += 1;
        let report = stabilize(&g).unwrap();
        assert!(is_stable(&report.output));
        assert!(report.steps.len() <= g.vertices().len());
        assert_eq!(report.output.marks(), g.marks());
        for h in terminal_forms(&g) {
            assert!(h.is_isomorphic(&report.output).unwrap());
        }
        let js = serde_json::to_string(&report).unwrap();
        assert_eq!(serde_json::from_str::<skeletron::stable::StabilizationReport>(&js).unwrap(), report);
    }
}
