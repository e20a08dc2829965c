//! Discs as points of the Berkovich tree, the tree metric, and the reduced
//! convex hull of a paired configuration.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::Rational64;
use num_traits::Zero;

use crate::clusters::{clusters_of, distance_matrix, PairedConfiguration};
use crate::error::{Error, Result};
use crate::projline::{Mobius, PPoint};
use crate::valfield::{FieldCtx, FieldElem, ValRat};

/// The closed disc {z : v(z − center) ≥ radius}.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Disc {
    pub center: FieldElem,
    pub radius: Rational64,
}

impl Disc {
    pub fn new(center: FieldElem, radius: Rational64) -> Disc {
        Disc { center, radius }
    }

    pub fn contains_point(&self, ctx: &FieldCtx, z: &FieldElem) -> bool {
        ctx.dist(z, &self.center) >= ValRat::Finite(self.radius)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, ctx: &FieldCtx, other: &Disc) -> bool {
        other.radius >= self.radius && self.contains_point(ctx, &other.center)
    }

    /// `other ⊊ self`.
    pub fn strictly_contains(&self, ctx: &FieldCtx, other: &Disc) -> bool {
        other.radius > self.radius && self.contains_point(ctx, &other.center)
    }

    pub fn same(&self, ctx: &FieldCtx, other: &Disc) -> bool {
        self.radius == other.radius && self.contains_point(ctx, &other.center)
    }

    /// The disc with the same center family and a different radius, i.e.
    /// the unique disc of radius `r` containing (or contained in) this one.
    pub fn with_radius(&self, r: Rational64) -> Disc {
        Disc {
            center: self.center.clone(),
            radius: r,
        }
    }

    /// Image of the corresponding Berkovich point under a Möbius map.
    pub fn transform(&self, ctx: &FieldCtx, m: &Mobius) -> Disc {
        let [a, b, c, d] = m.entries();
        let v_det = ctx.valuation(&m.det()).expect_finite();
        let r = self.radius;
        if !c.is_zero() {
            let den = c * &self.center + d.clone();
            let v_den = ctx.valuation(&den);
            let v_c = ctx.valuation(c).expect_finite();
            // The pole −d/c lies in the disc iff v(c·center + d) − v(c) ≥ r.
            if v_den >= ValRat::Finite(v_c + r) {
                let center = a.checked_div(c).expect("c is nonzero");
                return Disc::new(center, v_det - v_c - v_c - r);
            }
            let center = (a * &self.center + b.clone())
                .checked_div(&den)
                .expect("pole outside the disc");
            let v_den = v_den.expect_finite();
            return Disc::new(center, v_det + r - v_den - v_den);
        }
        let v_d = ctx.valuation(d).expect_finite();
        let center = (a * &self.center + b.clone())
            .checked_div(d)
            .expect("d is nonzero when c = 0");
        Disc::new(center, v_det + r - v_d - v_d)
    }
}

/// The smallest disc containing both.
pub fn join(ctx: &FieldCtx, d1: &Disc, d2: &Disc) -> Disc {
    let r = match ctx.dist(&d1.center, &d2.center) {
        ValRat::Finite(v) => v.min(d1.radius).min(d2.radius),
        ValRat::Infinity => d1.radius.min(d2.radius),
    };
    Disc::new(d1.center.clone(), r)
}

/// Path distance between the points of two discs.
pub fn delta(ctx: &FieldCtx, d1: &Disc, d2: &Disc) -> Rational64 {
    let j = join(ctx, d1, d2);
    d1.radius + d2.radius - j.radius - j.radius
}

/// The minimal disc containing at least two distinct points.
pub fn minimal_disc(ctx: &FieldCtx, pts: &[&FieldElem]) -> Disc {
    let mut r: Option<Rational64> = None;
    for (k, x) in pts.iter().enumerate() {
        for y in &pts[k + 1..] {
            if let ValRat::Finite(v) = ctx.dist(x, y) {
                r = Some(r.map_or(v, |r| r.min(v)));
            }
        }
    }
    Disc::new(pts[0].clone(), r.expect("at least two distinct points"))
}

/// Distance from the point of `disc` to the axis joining `a` and `b`.
pub fn distance_to_axis(ctx: &FieldCtx, disc: &Disc, a: &PPoint, b: &PPoint) -> Rational64 {
    let d = disc.radius;
    let reach = |x: &FieldElem| match ctx.dist(&disc.center, x) {
        ValRat::Finite(v) => v.min(d),
        ValRat::Infinity => d,
    };
    match (a, b) {
        (PPoint::Finite(a), PPoint::Finite(b)) => {
            let v_ab = ctx.dist(a, b).expect_finite();
            d - reach(a) - reach(b) + v_ab
        }
        (PPoint::Finite(x), PPoint::Infinity) | (PPoint::Infinity, PPoint::Finite(x)) => {
            d - reach(x)
        }
        _ => panic!("an axis needs two distinct points"),
    }
}

/// D_i: the minimal disc containing {a_i, b_i}, or all finite points when
/// the pair contains ∞.
pub fn pair_disc(pcfg: &PairedConfiguration, i: usize) -> Disc {
    let ctx = pcfg.ctx();
    let (a, b) = pcfg.pair(i);
    match (a, b) {
        (PPoint::Finite(a), PPoint::Finite(b)) => minimal_disc(ctx, &[a, b]),
        _ => {
            let pts = pcfg.points();
            let fin: Vec<&FieldElem> = pts.iter().filter_map(|p| p.finite()).collect();
            minimal_disc(ctx, &fin)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullVertex {
    pub id: usize,
    pub disc: Disc,
    pub distinguished: bool,
    pub pair_index: Option<usize>,
    pub component: usize,
    /// Number of finite points in the disc.
    pub cluster_size: usize,
}

/// An edge from a vertex to the vertex of its parent cluster.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HullEdge {
    pub u: usize,
    pub v: usize,
    pub length: Rational64,
}

/// The reduced convex hull as a finite metric forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonTree {
    pub vertices: Vec<HullVertex>,
    pub edges: Vec<HullEdge>,
    /// Odd clusters other than singletons and the full finite set.
    pub odd_clusters: usize,
}

impl SkeletonTree {
    pub fn empty() -> SkeletonTree {
        SkeletonTree {
            vertices: Vec::new(),
            edges: Vec::new(),
            odd_clusters: 0,
        }
    }

    pub fn distinguished(&self) -> impl Iterator<Item = &HullVertex> {
        self.vertices.iter().filter(|v| v.distinguished)
    }

    pub fn valency(&self, id: usize) -> usize {
        self.edges.iter().filter(|e| e.u == id || e.v == id).count()
    }

    pub fn component_count(&self) -> usize {
        self.vertices
            .iter()
            .map(|v| v.component + 1)
            .max()
            .unwrap_or(0)
    }

    /// Vertex of D_i.
    pub fn pair_vertex(&self, i: usize) -> &HullVertex {
        &self.vertices[i]
    }

    /// Path length between two vertices, if they share a component.
    pub fn distance(&self, from: usize, to: usize) -> Option<Rational64> {
        let mut best: BTreeMap<usize, Rational64> = BTreeMap::new();
        let mut stack = vec![(from, Rational64::zero())];
        while let Some((x, d)) = stack.pop() {
            if best.contains_key(&x) {
                continue;
            }
            best.insert(x, d);
            for e in &self.edges {
                let next = if e.u == x {
                    e.v
                } else if e.v == x {
                    e.u
                } else {
                    continue;
                };
                if !best.contains_key(&next) {
                    stack.push((next, d + e.length));
                }
            }
        }
        best.get(&to).copied()
    }
}

/// Builds the reduced convex hull of a configuration with ∞ = b_g.
///
/// Vertices are the minimal discs of clusters with at least two points;
/// a vertex is joined to its parent cluster's vertex unless its cluster is
/// odd (those segments separate the points into odd parts and are removed).
/// Vertex ids: D_0 … D_g first, then the other distinguished vertices, then
/// branch vertices.
pub fn reduced_convex_hull(pcfg: &PairedConfiguration) -> Result<SkeletonTree> {
    if !pcfg.has_infinity() {
        return Err(Error::InvalidInput(
            "the reduced convex hull needs inf as b_g".into(),
        ));
    }
    let ctx = pcfg.ctx();
    let g = pcfg.genus();
    let mut owner = Vec::new();
    let mut elems: Vec<&FieldElem> = Vec::new();
    for (i, (a, b)) in pcfg.pairs().iter().enumerate() {
        for p in [a, b] {
            if let Some(x) = p.finite() {
                owner.push(i);
                elems.push(x);
            }
        }
    }
    let dist = distance_matrix(ctx, &elems);
    let clusters: Vec<_> = clusters_of(&dist)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .collect();
    let parent: Vec<Option<usize>> = (0..clusters.len())
        .map(|k| {
            (k + 1..clusters.len()).find(|&m| {
                clusters[m].len() > clusters[k].len()
                    && clusters[k].members.iter().all(|x| clusters[m].contains(*x))
            })
        })
        .collect();

    let not_paired =
        || Error::InvalidInput("configuration is not clustered in separated pairs".into());
    let mut pair_of = Vec::with_capacity(clusters.len());
    for cl in &clusters {
        let mut hits = vec![0usize; g + 1];
        for &m in &cl.members {
            hits[owner[m]] += 1;
        }
        let pi = if cl.is_even() {
            (0..g).find(|&i| {
                hits[i] == 2 && {
                    let (a, b) = pcfg.pair(i);
                    ctx.dist(a.finite().unwrap(), b.finite().unwrap()) == cl.depth
                }
            })
        } else {
            let split: Vec<usize> = (0..=g).filter(|&i| hits[i] == 1).collect();
            if split.len() != 1 {
                return Err(not_paired());
            }
            Some(split[0])
        };
        pair_of.push(pi);
    }

    // Order: pair discs by index, other distinguished, then branch vertices.
    let rank = |k: usize| -> (u8, usize, std::cmp::Reverse<Rational64>, Vec<usize>) {
        let depth = clusters[k].depth.expect_finite();
        match pair_of[k] {
            Some(i) if clusters[k].is_even() || clusters[k].len() == elems.len() => {
                (0, i, std::cmp::Reverse(depth), Vec::new())
            }
            Some(i) => (1, i, std::cmp::Reverse(depth), Vec::new()),
            None => (2, 0, std::cmp::Reverse(depth), clusters[k].members.clone()),
        }
    };
    let mut order: Vec<usize> = (0..clusters.len()).collect();
    order.sort_by_key(|&k| rank(k));
    for (i, &k) in order.iter().enumerate().take(g + 1) {
        if rank(k).0 != 0 || rank(k).1 != i {
            return Err(not_paired());
        }
    }
    let mut id_of = vec![0; clusters.len()];
    for (id, &k) in order.iter().enumerate() {
        id_of[k] = id;
    }

    let mut edges = Vec::new();
    for k in 0..clusters.len() {
        if let (true, Some(par)) = (clusters[k].is_even(), parent[k]) {
            let length = clusters[k].depth.expect_finite() - clusters[par].depth.expect_finite();
            edges.push(HullEdge {
                u: id_of[k],
                v: id_of[par],
                length,
            });
        }
    }
    edges.sort_by_key(|e| (e.u, e.v));

    // Components numbered by their smallest vertex id.
    let n = clusters.len();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(comp: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while comp[r] != r {
            r = comp[r];
        }
        comp[x] = r;
        r
    }
    for e in &edges {
        let (ru, rv) = (find(&mut comp, e.u), find(&mut comp, e.v));
        let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
        comp[hi] = lo;
    }
    let mut label: BTreeMap<usize, usize> = BTreeMap::new();
    let mut vertices = Vec::with_capacity(n);
    for (id, &k) in order.iter().enumerate() {
        let root = find(&mut comp, id);
        let next = label.len();
        let component = *label.entry(root).or_insert(next);
        let center = match pair_of[k] {
            Some(i) => {
                let (a, b) = pcfg.pair(i);
                let a = a.finite().unwrap();
                let inside = |x: &FieldElem| {
                    elems
                        .iter()
                        .position(|e| *e == x)
                        .is_some_and(|m| clusters[k].contains(m))
                };
                if inside(a) {
                    a.clone()
                } else {
                    b.finite().unwrap().clone()
                }
            }
            None => elems[clusters[k].members[0]].clone(),
        };
        vertices.push(HullVertex {
            id,
            disc: Disc::new(center, clusters[k].depth.expect_finite()),
            distinguished: pair_of[k].is_some(),
            pair_index: pair_of[k],
            component,
            cluster_size: clusters[k].len(),
        });
    }
    let odd_clusters = clusters
        .iter()
        .filter(|c| !c.is_even() && c.len() < elems.len())
        .count();
    Ok(SkeletonTree {
        vertices,
        edges,
        odd_clusters,
    })
}

/// True when every distinguished vertex has valency at most 1, in which case
/// the configuration is already optimal.
pub fn is_trivially_optimal(tree: &SkeletonTree) -> bool {
    tree.distinguished().all(|v| tree.valency(v.id) <= 1)
}

/// One sub-configuration per component: the pairs whose axes meet it.
pub fn split_by_components(
    pcfg: &PairedConfiguration,
    tree: &SkeletonTree,
) -> Vec<PairedConfiguration> {
    let mut out = Vec::new();
    for m in 0..tree.component_count() {
        let mut idx: Vec<usize> = tree
            .vertices
            .iter()
            .filter(|v| v.component == m)
            .filter_map(|v| v.pair_index)
            .collect();
        idx.sort_unstable();
        idx.dedup();
        let pairs = idx.iter().map(|&i| pcfg.pairs()[i].clone()).collect();
        out.push(PairedConfiguration::from_labeled(pcfg.ctx(), pairs));
    }
    out
}

/// Graphviz rendering with pair indices, discs and edge lengths.
pub fn to_dot(tree: &SkeletonTree) -> String {
    let mut s = String::from("graph skeleton {\n");
    for v in &tree.vertices {
        let disc = format!(
            "center {}\\nradius {}",
            v.disc.center,
            ValRat::Finite(v.disc.radius)
        );
        match v.pair_index {
            Some(i) => {
                let _ = writeln!(
                    s,
                    "  v{} [label=\"v{} (pair {})\\n{}\", shape=box, component={}];",
                    v.id, v.id, i, disc, v.component
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "  v{} [label=\"v{}\\n{}\", shape=ellipse, component={}];",
                    v.id, v.id, disc, v.component
                );
            }
        }
    }
    for e in &tree.edges {
        let _ = writeln!(
            s,
            "  v{} -- v{} [label=\"{}\"];",
            e.u,
            e.v,
            ValRat::Finite(e.length)
        );
    }
    s.push_str("}\n");
    s
}
