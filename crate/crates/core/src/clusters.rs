//! Cluster data of a configuration and the pairing test.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;

use crate::error::{Error, Result};
use crate::projline::PPoint;
use crate::valfield::{FieldCtx, FieldElem, ValRat};

/// An ordered multiset of points of P¹(K).
///
/// Order matters only for tie-breaking when pairs are indexed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    ctx: FieldCtx,
    points: Vec<PPoint>,
}

impl Configuration {
    /// A validated input configuration: even cardinality ≥ 4, at most one ∞.
    pub fn new(ctx: &FieldCtx, points: Vec<PPoint>) -> Result<Configuration> {
        if points.len() < 4 || !points.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "a configuration needs an even number of at least 4 points, got {}",
                points.len()
            )));
        }
        if points.iter().filter(|p| p.is_infinity()).count() > 1 {
            return Err(Error::InvalidInput("inf may appear at most once".into()));
        }
        Ok(Configuration {
            ctx: ctx.clone(),
            points,
        })
    }

    /// Any multiset, without the input checks (folds can produce these).
    pub fn multiset(ctx: &FieldCtx, points: Vec<PPoint>) -> Configuration {
        Configuration {
            ctx: ctx.clone(),
            points,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn points(&self) -> &[PPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Finite points with their positions in `points`.
    pub fn finite_points(&self) -> Vec<(usize, &FieldElem)> {
        self.points
            .iter()
            .enumerate()
            .filter_map(|(k, p)| p.finite().map(|x| (k, x)))
            .collect()
    }

    /// Same multiset, ignoring order.
    pub fn same_multiset(&self, other: &Configuration) -> bool {
        let mut a = self.points.clone();
        let mut b = other.points.clone();
        a.sort();
        b.sort();
        a == b
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.points.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cluster {
    /// Indices into the list of finite points, ascending.
    pub members: Vec<usize>,
    pub depth: ValRat,
}

impl Cluster {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.members.len().is_multiple_of(2)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.members.binary_search(&k).is_ok()
    }
}

/// Pairwise valuations v(x − y) of a list of field elements.
pub(crate) fn distance_matrix(ctx: &FieldCtx, pts: &[&FieldElem]) -> Vec<Vec<ValRat>> {
    let n = pts.len();
    let mut m = vec![vec![ValRat::Infinity; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = ctx.dist(pts[i], pts[j]);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

/// Every cluster of the given finite points, each exactly once, ordered
/// by size and then by members. Singletons have depth +∞.
pub(crate) fn clusters_of(dist: &[Vec<ValRat>]) -> Vec<Cluster> {
    let n = dist.len();
    let mut found: BTreeMap<Vec<usize>, ValRat> = BTreeMap::new();
    for row in dist {
        let radii: BTreeSet<ValRat> = row.iter().copied().collect();
        for r in radii {
            let members: Vec<usize> = (0..n).filter(|&y| row[y] >= r).collect();
            found.entry(members).or_insert(r);
        }
    }
    let mut out: Vec<Cluster> = found
        .into_keys()
        .map(|members| {
            let mut depth = ValRat::Infinity;
            for (k, &a) in members.iter().enumerate() {
                for &b in &members[k + 1..] {
                    depth = depth.min(dist[a][b]);
                }
            }
            Cluster { members, depth }
        })
        .collect();
    out.sort_by(|a, b| {
        a.members
            .len()
            .cmp(&b.members.len())
            .then_with(|| a.members.cmp(&b.members))
    });
    out
}

/// All clusters of the finite points of `cfg` (∞ never belongs to one).
/// Member indices refer to `cfg.finite_points()`.
pub fn cluster_data(cfg: &Configuration) -> Vec<Cluster> {
    let pts: Vec<&FieldElem> = cfg.finite_points().into_iter().map(|(_, x)| x).collect();
    clusters_of(&distance_matrix(&cfg.ctx, &pts))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PairingFailure {
    /// Some class of points sharing the same even clusters is not a pair.
    NotClusteredInPairs,
    /// Two pair axes are within 2ρ of each other.
    NotSeparated {
        first: usize,
        second: usize,
        distance: Rational64,
    },
}

impl fmt::Display for PairingFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairingFailure::NotClusteredInPairs => f.write_str("not clustered in pairs"),
            PairingFailure::NotSeparated {
                first,
                second,
                distance,
            } => {
                write!(f, "axes of pairs {first} and {second} are at distance {distance}, not more than 2*rho")
            }
        }
    }
}

/// Pairs {a_i, b_i}, i = 0..g, of a configuration clustered in
/// ρ-separated pairs. When ∞ is present it is b_g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedConfiguration {
    ctx: FieldCtx,
    pairs: Vec<(PPoint, PPoint)>,
}

impl PairedConfiguration {
    /// Checks that the given labeled pairs are exactly the pairing of their
    /// points, in any order, and keeps the given labels.
    pub fn from_pairs(ctx: &FieldCtx, pairs: Vec<(PPoint, PPoint)>) -> Result<PairedConfiguration> {
        let pts: Vec<PPoint> = pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect();
        let cfg = Configuration::multiset(ctx, pts);
        let found = pair_up(&cfg).map_err(Error::NotPaired)?;
        let norm = |v: &[(PPoint, PPoint)]| {
            let mut s: Vec<(PPoint, PPoint)> = v
                .iter()
                .map(|(a, b)| {
                    if a <= b {
                        (a.clone(), b.clone())
                    } else {
                        (b.clone(), a.clone())
                    }
                })
                .collect();
            s.sort();
            s
        };
        if norm(&found.pairs) != norm(&pairs) {
            return Err(Error::InvalidInput(
                "the given pairs are not the pairing of these points".into(),
            ));
        }
        if pairs
            .iter()
            .take(pairs.len() - 1)
            .any(|(a, b)| a.is_infinity() || b.is_infinity())
            || pairs.last().is_some_and(|(a, _)| a.is_infinity())
        {
            return Err(Error::InvalidInput(
                "inf must be the last point of the last pair".into(),
            ));
        }
        Ok(PairedConfiguration {
            ctx: ctx.clone(),
            pairs,
        })
    }

    /// Wraps pairs already known to be a valid labeled pairing.
    pub(crate) fn from_labeled(
        ctx: &FieldCtx,
        pairs: Vec<(PPoint, PPoint)>,
    ) -> PairedConfiguration {
        PairedConfiguration {
            ctx: ctx.clone(),
            pairs,
        }
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn pairs(&self) -> &[(PPoint, PPoint)] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> (&PPoint, &PPoint) {
        let (a, b) = &self.pairs[i];
        (a, b)
    }

    /// g, the index of the last pair.
    pub fn genus(&self) -> usize {
        self.pairs.len() - 1
    }

    /// Points listed as a_0, b_0, a_1, b_1, …
    pub fn points(&self) -> Vec<PPoint> {
        self.pairs
            .iter()
            .flat_map(|(a, b)| [a.clone(), b.clone()])
            .collect()
    }

    pub fn to_configuration(&self) -> Configuration {
        Configuration::multiset(&self.ctx, self.points())
    }

    pub fn has_infinity(&self) -> bool {
        self.pairs.last().is_some_and(|(_, b)| b.is_infinity())
    }
}

impl fmt::Display for PairedConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (a, b)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{{{a}, {b}}}")?;
        }
        Ok(())
    }
}

/// Distance from the axis between `a` and `b` to the axis between `c` and
/// `d` in the tree of discs, given the four pairwise valuations across and
/// the two within. Infinite valuations come from ∞ endpoints and drop out.
pub(crate) fn axis_gap(
    within_ab: ValRat,
    within_cd: ValRat,
    ac: ValRat,
    bd: ValRat,
    ad: ValRat,
    bc: ValRat,
) -> Rational64 {
    // Gromov product form: v(a−b) + v(c−d) − max(v(a−c) + v(b−d), v(a−d) + v(b−c)),
    // where a term involving ∞ contributes 0 (the ∞ endpoints cancel out).
    let fin = |v: ValRat| v.finite().unwrap_or_default();
    let cross1 = fin(ac) + fin(bd);
    let cross2 = fin(ad) + fin(bc);
    let gap = fin(within_ab) + fin(within_cd) - cross1.max(cross2);
    gap.max(Rational64::default())
}

/// Finds the unique pairing of a set clustered in ρ-separated pairs.
///
/// Pairs are indexed by decreasing depth of their minimal disc, ties
/// broken by the position of the earlier point in the input; the pair
/// containing ∞ (or, without ∞, the remaining last pair) gets index g.
/// Within a pair the earlier input point comes first, except that ∞ is
/// always b_g.
pub fn pair_up(cfg: &Configuration) -> std::result::Result<PairedConfiguration, PairingFailure> {
    let ctx = cfg.ctx();
    let pts = cfg.points();
    let n = pts.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if pts[i] == pts[j] {
                return Err(PairingFailure::NotClusteredInPairs);
            }
        }
    }
    let finite = cfg.finite_points();
    let elems: Vec<&FieldElem> = finite.iter().map(|(_, x)| *x).collect();
    let dist = distance_matrix(ctx, &elems);
    let clusters = clusters_of(&dist);
    let even: Vec<&Cluster> = clusters
        .iter()
        .filter(|c| c.is_even() && c.len() < elems.len())
        .collect();
    // Points sharing exactly the same even clusters; ∞ and points in no
    // proper even cluster share the empty signature.
    let mut classes: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for k in 0..n {
        let sig = match cfg.points()[k].finite() {
            None => Vec::new(),
            Some(_) => {
                let fk = finite.iter().position(|(pos, _)| *pos == k).unwrap();
                even.iter()
                    .enumerate()
                    .filter(|(_, c)| c.contains(fk))
                    .map(|(e, _)| e)
                    .collect()
            }
        };
        classes.entry(sig).or_default().push(k);
    }
    if classes.values().any(|c| c.len() != 2) {
        return Err(PairingFailure::NotClusteredInPairs);
    }

    let fpos = |k: usize| finite.iter().position(|(pos, _)| *pos == k);
    let mut raw: Vec<(usize, usize)> = classes.into_values().map(|c| (c[0], c[1])).collect();
    let depth = |(x, y): (usize, usize)| match (fpos(x), fpos(y)) {
        (Some(a), Some(b)) => dist[a][b],
        _ => ValRat::Finite(Rational64::from_integer(i64::MIN / 4)),
    };
    raw.sort_by(|&p, &q| {
        let inf_p = pts[p.1].is_infinity() || pts[p.0].is_infinity();
        let inf_q = pts[q.1].is_infinity() || pts[q.0].is_infinity();
        inf_p
            .cmp(&inf_q)
            .then_with(|| depth(q).cmp(&depth(p)))
            .then_with(|| p.0.cmp(&q.0))
    });
    // Separation: all pairwise axis distances must exceed 2ρ.
    let two_rho = ctx.rho() * Rational64::from_integer(2);
    let d = |x: usize, y: usize| -> ValRat {
        match (fpos(x), fpos(y)) {
            (Some(a), Some(b)) => dist[a][b],
            _ => ValRat::Infinity,
        }
    };
    for s in 0..raw.len() {
        for t in (s + 1)..raw.len() {
            let (a, b) = raw[s];
            let (c, e) = raw[t];
            let gap = axis_gap(d(a, b), d(c, e), d(a, c), d(b, e), d(a, e), d(b, c));
            if gap <= two_rho {
                return Err(PairingFailure::NotSeparated {
                    first: s,
                    second: t,
                    distance: gap,
                });
            }
        }
    }

    let pairs = raw
        .into_iter()
        .map(|(x, y)| {
            if pts[x].is_infinity() {
                (pts[y].clone(), pts[x].clone())
            } else {
                (pts[x].clone(), pts[y].clone())
            }
        })
        .collect();
    Ok(PairedConfiguration {
        ctx: ctx.clone(),
        pairs,
    })
}

/// Number of distinct values occurring more than once, and the underlying
/// set (first occurrences, in order).
pub fn repetition_report(cfg: &Configuration) -> (usize, Configuration) {
    let mut seen: Vec<PPoint> = Vec::new();
    let mut repeated: BTreeSet<PPoint> = BTreeSet::new();
    for p in cfg.points() {
        if seen.contains(p) {
            repeated.insert(p.clone());
        } else {
            seen.push(p.clone());
        }
    }
    (repeated.len(), Configuration::multiset(cfg.ctx(), seen))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(ctx: &FieldCtx, pts: &[&str]) -> Configuration {
        Configuration::multiset(
            ctx,
            pts.iter().map(|s| PPoint::parse(ctx, s).unwrap()).collect(),
        )
    }

    fn finite_members(c: &Configuration, cl: &Cluster) -> Vec<String> {
        let f = c.finite_points();
        cl.members.iter().map(|&k| f[k].1.to_string()).collect()
    }

    #[test]
    fn clusters_of_the_second_example() {
        let ctx = FieldCtx::new(2, 7).unwrap();
        let c = cfg(
            &ctx,
            &["1336/3", "-355", "-110", "86", "0", "7", "1", "inf"],
        );
        let cl = cluster_data(&c);
        let find = |names: &[&str]| {
            cl.iter().find(|x| {
                let mut m = finite_members(&c, x);
                m.sort();
                let mut want: Vec<String> = names.iter().map(|s| s.to_string()).collect();
                want.sort();
                m == want
            })
        };
        assert_eq!(find(&["1336/3", "-355"]).unwrap().depth, ValRat::int(4));
        assert_eq!(find(&["0", "7"]).unwrap().depth, ValRat::int(1));
        assert!(find(&["-110", "86"]).is_none());
        assert_eq!(
            find(&["1336/3", "-355", "-110", "86"]).unwrap().depth,
            ValRat::int(2)
        );
        assert!(cl
            .iter()
            .filter(|x| x.len() == 1)
            .all(|x| x.depth == ValRat::Infinity));
        assert_eq!(cl.last().unwrap().len(), 7);
        assert_eq!(cl.last().unwrap().depth, ValRat::int(0));
    }

    #[test]
    fn pair_up_examples() {
        let ctx = FieldCtx::new(2, 5).unwrap();
        let p = pair_up(&cfg(&ctx, &["7", "12", "0", "5", "1", "inf"])).unwrap();
        assert_eq!(p.to_string(), "{7, 12}, {0, 5}, {1, inf}");
        assert_eq!(
            pair_up(&cfg(&ctx, &["-5", "-10", "0", "5", "1", "inf"])),
            Err(PairingFailure::NotClusteredInPairs)
        );
        let p = pair_up(&cfg(&ctx, &["0", "125", "5", "1", "6", "inf"])).unwrap();
        assert_eq!(p.to_string(), "{0, 125}, {1, 6}, {5, inf}");
    }

    #[test]
    fn pair_up_second_example_order() {
        let ctx = FieldCtx::new(2, 7).unwrap();
        let p = pair_up(&cfg(
            &ctx,
            &["1336/3", "-355", "-110", "86", "0", "7", "1", "inf"],
        ))
        .unwrap();
        assert_eq!(
            p.to_string(),
            "{1336/3, -355}, {-110, 86}, {0, 7}, {1, inf}"
        );
        let p = pair_up(&cfg(
            &ctx,
            &["9", "-40", "-110", "86", "0", "7", "1", "inf"],
        ))
        .unwrap();
        assert_eq!(p.to_string(), "{9, -40}, {-110, 86}, {0, 7}, {1, inf}");
    }

    #[test]
    fn separation_counts_sibling_axes() {
        // Over Q_2 (rho = 1) the axes of {0, 64} and {32, 96} are at distance 2.
        let ctx = FieldCtx::new(2, 2).unwrap();
        let r = pair_up(&cfg(&ctx, &["0", "64", "32", "96", "1", "inf"]));
        assert!(
            matches!(r, Err(PairingFailure::NotSeparated { .. })),
            "{r:?}"
        );
        let r = pair_up(&cfg(&ctx, &["0", "32", "1", "inf"]));
        assert!(r.is_ok());
        let r = pair_up(&cfg(&ctx, &["0", "4", "1", "inf"]));
        assert!(matches!(r, Err(PairingFailure::NotSeparated { .. })));
    }

    #[test]
    fn repeated_points_are_not_paired() {
        let ctx = FieldCtx::new(2, 5).unwrap();
        assert_eq!(
            pair_up(&cfg(&ctx, &["0", "0", "5", "1"])),
            Err(PairingFailure::NotClusteredInPairs)
        );
    }

    #[test]
    fn repetition_examples() {
        let ctx = FieldCtx::new(2, 5).unwrap();
        let (k, u) = repetition_report(&cfg(&ctx, &["0", "0", "5", "5", "1", "inf"]));
        assert_eq!((k, u.to_string()), (2, "{0, 5, 1, inf}".to_string()));
        let (k, u) = repetition_report(&cfg(&ctx, &["0", "0", "5", "7", "1", "inf"]));
        assert_eq!((k, u.to_string()), (1, "{0, 5, 7, 1, inf}".to_string()));
        let c = cfg(&ctx, &["0", "0", "0", "7"]);
        assert_eq!(repetition_report(&c).0, 1);
        let c = cfg(&ctx, &["7", "12", "0", "5"]);
        assert_eq!(repetition_report(&c), (0, c.clone()));
    }

    #[test]
    fn input_validation() {
        let ctx = FieldCtx::new(2, 5).unwrap();
        let p = |s: &str| PPoint::parse(&ctx, s).unwrap();
        assert!(Configuration::new(&ctx, vec![p("0"), p("5"), p("1")]).is_err());
        assert!(Configuration::new(&ctx, vec![p("0"), p("5"), p("inf"), p("inf")]).is_err());
        assert!(Configuration::new(&ctx, vec![p("0"), p("5"), p("1"), p("inf")]).is_ok());
    }
}
