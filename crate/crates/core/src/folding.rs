//! The folding algorithm: disc constructions, the fold test, fold
//! application and the driver producing a [`Verdict`].

use num_rational::Rational64;

use crate::clusters::{
    clusters_of, distance_matrix, pair_up, repetition_report, Cluster, Configuration,
    PairedConfiguration, PairingFailure,
};
use crate::error::{Error, Result};
use crate::hull::{delta, join, minimal_disc, pair_disc, reduced_convex_hull, Disc};
use crate::projline::{order_p_fixing, Mobius, PPoint};
use crate::valfield::{FieldCtx, FieldElem, ValRat};

/// Hard stop for the driver. Termination is guaranteed in theory; hitting
/// this means a bug.
pub const MAX_FOLDS: usize = 1000;

/// The inequality instance that justified a fold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub l: usize,
    pub c_i: FieldElem,
    pub c_l: FieldElem,
    /// v(w(c_l) − ζⁿ·w(c_i)).
    pub lhs: ValRat,
    /// v(w(c_l)); the test is lhs > rhs + ρ.
    pub rhs: ValRat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldingStep {
    pub i: usize,
    pub j: usize,
    pub n: u32,
    /// Indices of the pairs moved by the fold.
    pub indices: Vec<usize>,
    pub map: Mobius,
    pub before: PairedConfiguration,
    pub after: Configuration,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotGoodReason {
    /// The input itself is not clustered in separated pairs.
    InitialNotPaired(PairingFailure),
    /// A fold produced a configuration that is not clustered in separated pairs.
    BadFoldingProduced {
        step: Box<FoldingStep>,
        failure: PairingFailure,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Good {
        s_min: PairedConfiguration,
        trace: Vec<FoldingStep>,
    },
    NotGood {
        reason: NotGoodReason,
        trace: Vec<FoldingStep>,
    },
    Redundant {
        reduced: Configuration,
        trace: Vec<FoldingStep>,
    },
}

impl Verdict {
    pub fn trace(&self) -> &[FoldingStep] {
        match self {
            Verdict::Good { trace, .. }
            | Verdict::NotGood { trace, .. }
            | Verdict::Redundant { trace, .. } => trace,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Good { .. } => "good",
            Verdict::NotGood { .. } => "not_good",
            Verdict::Redundant { .. } => "redundant",
        }
    }

    pub fn is_good(&self) -> bool {
        matches!(self, Verdict::Good { .. })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FoldClass {
    Good,
    Bad,
    Neither,
}

/// Cluster structure of a paired configuration, computed once per pass.
struct Layout<'a> {
    pcfg: &'a PairedConfiguration,
    ctx: &'a FieldCtx,
    /// Position of each pair's finite points in the cluster index space.
    slots: Vec<Vec<usize>>,
    clusters: Vec<Cluster>,
    discs: Vec<Disc>,
}

impl<'a> Layout<'a> {
    fn new(pcfg: &'a PairedConfiguration) -> Layout<'a> {
        let ctx = pcfg.ctx();
        let mut elems: Vec<&FieldElem> = Vec::new();
        let mut slots = Vec::new();
        for (a, b) in pcfg.pairs() {
            let mut s = Vec::new();
            for p in [a, b] {
                if let Some(x) = p.finite() {
                    s.push(elems.len());
                    elems.push(x);
                }
            }
            slots.push(s);
        }
        let clusters = clusters_of(&distance_matrix(ctx, &elems));
        let discs = (0..pcfg.pairs().len())
            .map(|i| pair_disc(pcfg, i))
            .collect();
        Layout {
            pcfg,
            ctx,
            slots,
            clusters,
            discs,
        }
    }

    fn g(&self) -> usize {
        self.pcfg.genus()
    }

    fn finite(&self, i: usize) -> Vec<&'a FieldElem> {
        let (a, b) = self.pcfg.pair(i);
        [a, b].into_iter().filter_map(|p| p.finite()).collect()
    }

    /// The smallest odd cluster containing pair i; the full finite set for
    /// the pair containing ∞.
    fn odd_hull(&self, i: usize) -> &Cluster {
        let full = self.clusters.last().expect("nonempty");
        if i == self.g() {
            return full;
        }
        self.clusters
            .iter()
            .find(|c| !c.is_even() && self.slots[i].iter().all(|&k| c.contains(k)))
            .unwrap_or(full)
    }

    fn d_j_of_i(&self, i: usize, j: usize) -> Option<Disc> {
        if self.odd_hull(i) == self.odd_hull(j) {
            return Some(self.discs[j].clone());
        }
        let (a_j, b_j) = self.pcfg.pair(j);
        for (x, y) in [(a_j, b_j), (b_j, a_j)] {
            let Some(x) = x.finite() else { continue };
            let mut pts = self.finite(i);
            pts.push(x);
            let disc = minimal_disc(self.ctx, &pts);
            let excludes_y = match y {
                PPoint::Infinity => true,
                PPoint::Finite(y) => !disc.contains_point(self.ctx, y),
            };
            if excludes_y {
                return Some(disc);
            }
        }
        None
    }

    fn tilde(&self, i: usize, j: usize) -> Result<Disc> {
        let star = self.d_j_of_i(i, j).ok_or(Error::Undefined { i, j })?;
        let d_i = &self.discs[i];
        let jn = join(self.ctx, d_i, &star);
        let rho = self.ctx.rho();
        if star.radius - jn.radius > rho {
            return Ok(star.with_radius(star.radius - rho));
        }
        let r = jn.radius + jn.radius - star.radius + rho;
        if r > d_i.radius {
            // v_i is within ρ of the axis; the nearest tube point is v_i itself.
            return Ok(d_i.clone());
        }
        Ok(d_i.with_radius(r))
    }

    fn select_target(&self, i: usize) -> Result<usize> {
        let d_i = &self.discs[i];
        let mut best: Option<(usize, Disc)> = None;
        for j in 0..=self.g() {
            if j == i {
                continue;
            }
            let Ok(t) = self.tilde(i, j) else { continue };
            if !t.strictly_contains(self.ctx, d_i) {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| t.radius > b.radius) {
                best = Some((j, t));
            }
        }
        best.map(|(j, _)| j)
            .ok_or(Error::Undefined { i, j: self.g() })
    }

    /// Pairs lying below D̃ on the same side as D_i.
    fn compute_i(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        let t = self.tilde(i, j)?;
        let c_i = self.finite(i)[0];
        let below = ValRat::Finite(t.radius);
        Ok((0..=self.g())
            .filter(|&l| l != j && self.finite(l).iter().any(|x| self.ctx.dist(x, c_i) > below))
            .collect())
    }

    fn find_fold_exponent(&self, i: usize, j: usize) -> Result<Option<(u32, Witness)>> {
        let indices = self.compute_i(i, j)?;
        let ctx = self.ctx;
        let (a_j, b_j) = self.pcfg.pair(j);
        let a_j = a_j.finite().expect("a_j is finite");
        let w = |z: &FieldElem| -> FieldElem {
            let num = z - a_j;
            match b_j {
                PPoint::Infinity => num,
                PPoint::Finite(b) => num.checked_div(&(z - b)).expect("z differs from b_j"),
            }
        };
        let rho = ctx.rho();
        for n in 1..ctx.p() {
            let zn = ctx.zeta_power(n as i64);
            for l in (0..=self.g()).rev() {
                if l == j || indices.contains(&l) {
                    continue;
                }
                for c_i in self.finite(i) {
                    let w_i = &zn * &w(c_i);
                    for c_l in self.finite(l) {
                        let w_l = w(c_l);
                        let lhs = ctx.valuation(&(&w_l - &w_i));
                        let rhs = ctx.valuation(&w_l);
                        if lhs > rhs + rho {
                            let witness = Witness {
                                l,
                                c_i: c_i.clone(),
                                c_l: c_l.clone(),
                                lhs,
                                rhs,
                            };
                            return Ok(Some((n, witness)));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    fn step(&self, i: usize, j: usize, n: u32, witness: Option<Witness>) -> Result<FoldingStep> {
        let indices = self.compute_i(i, j)?;
        let (a_j, b_j) = self.pcfg.pair(j);
        let map = order_p_fixing(self.ctx, a_j, b_j, n as i64)?;
        let mut pts = Vec::with_capacity(2 * self.pcfg.pairs().len());
        for (l, (a, b)) in self.pcfg.pairs().iter().enumerate() {
            if indices.contains(&l) {
                pts.push(map.apply(a));
                pts.push(map.apply(b));
            } else {
                pts.push(a.clone());
                pts.push(b.clone());
            }
        }
        Ok(FoldingStep {
            i,
            j,
            n,
            indices,
            map,
            before: self.pcfg.clone(),
            after: Configuration::multiset(self.ctx, pts),
            witness,
        })
    }
}

/// D_j^(i): the point of the axis of pair j nearest to D_i, when the path
/// to it stays inside the reduced hull.
pub fn d_j_of_i(pcfg: &PairedConfiguration, i: usize, j: usize) -> Option<Disc> {
    Layout::new(pcfg).d_j_of_i(i, j)
}

/// D̃_j^(i): the point at distance ρ from the axis of pair j on the way
/// from D_j^(i) towards D_i.
pub fn tilde_d_j_of_i(pcfg: &PairedConfiguration, i: usize, j: usize) -> Result<Disc> {
    Layout::new(pcfg).tilde(i, j)
}

/// The j whose D̃_j^(i) is the smallest disc strictly containing D_i
/// (smallest index on ties).
pub fn select_target(pcfg: &PairedConfiguration, i: usize) -> Result<usize> {
    Layout::new(pcfg).select_target(i)
}

/// Indices of the pairs below D̃_j^(i) in the direction of D_i, which a
/// fold of i towards j moves together.
pub fn compute_i(pcfg: &PairedConfiguration, i: usize, j: usize) -> Result<Vec<usize>> {
    Layout::new(pcfg).compute_i(i, j)
}

/// Searches n, then l (from the top index down), then the choice of
/// points, for v(w(c_l) − ζⁿ w(c_i)) > v(w(c_l)) + ρ with
/// w(z) = (z − a_j)/(z − b_j), or z − a_j when b_j = ∞.
pub fn find_fold_exponent(
    pcfg: &PairedConfiguration,
    i: usize,
    j: usize,
) -> Result<Option<(u32, Witness)>> {
    Layout::new(pcfg).find_fold_exponent(i, j)
}

/// Moves the pairs of `compute_i` through the order-p map fixing pair j.
pub fn apply_folding(
    pcfg: &PairedConfiguration,
    i: usize,
    j: usize,
    n: u32,
) -> Result<Configuration> {
    Ok(Layout::new(pcfg).step(i, j, n, None)?.after)
}

impl FoldingStep {
    /// A fold performed without consulting the inequality test.
    pub fn forced(pcfg: &PairedConfiguration, i: usize, j: usize, n: u32) -> Result<FoldingStep> {
        Layout::new(pcfg).step(i, j, n, None)
    }
}

pub fn classify_folding(step: &FoldingStep) -> FoldClass {
    match pair_up(&step.after) {
        Err(_) => FoldClass::Bad,
        Ok(_) if step.witness.is_some() => FoldClass::Good,
        Ok(_) => FoldClass::Neither,
    }
}

/// Runs the folding algorithm on a configuration containing ∞ once.
pub fn run_algorithm(cfg: &Configuration) -> Result<Verdict> {
    if cfg.len() < 4 || !cfg.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "need an even number of at least 4 points, got {}",
            cfg.len()
        )));
    }
    if cfg.points().iter().filter(|p| p.is_infinity()).count() != 1 {
        return Err(Error::InvalidInput(
            "the configuration must contain inf exactly once".into(),
        ));
    }
    let mut current = cfg.clone();
    let mut trace: Vec<FoldingStep> = Vec::new();
    loop {
        let (repeated, underlying) = repetition_report(&current);
        if repeated > 0 && repeated % 2 == 0 {
            return Ok(Verdict::Redundant {
                reduced: underlying,
                trace,
            });
        }
        let pcfg = match pair_up(&current) {
            Ok(p) => p,
            Err(failure) => {
                let reason = match trace.last() {
                    None => NotGoodReason::InitialNotPaired(failure),
                    Some(step) => NotGoodReason::BadFoldingProduced {
                        step: Box::new(step.clone()),
                        failure,
                    },
                };
                return Ok(Verdict::NotGood { reason, trace });
            }
        };
        let layout = Layout::new(&pcfg);
        let mut fold = None;
        for i in 0..pcfg.genus() {
            let j = layout.select_target(i)?;
            if let Some((n, witness)) = layout.find_fold_exponent(i, j)? {
                fold = Some(layout.step(i, j, n, Some(witness))?);
                break;
            }
        }
        match fold {
            None => return Ok(Verdict::Good { s_min: pcfg, trace }),
            Some(step) => {
                current = step.after.clone();
                trace.push(step);
                if trace.len() > MAX_FOLDS {
                    return Err(Error::FoldLimit(MAX_FOLDS));
                }
            }
        }
    }
}

/// Pairwise distances between the distinguished vertices of the hull
/// before a fold, and between their images under the fold.
///
/// The fold acts on the branch of D̃ containing D_i by the fold map and
/// fixes everything else; `after[k]` corresponds to `before[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceProfile {
    pub before: Vec<Rational64>,
    pub after: Vec<Rational64>,
}

impl DistanceProfile {
    pub fn non_increasing(&self) -> bool {
        self.before.iter().zip(&self.after).all(|(b, a)| a <= b)
    }

    pub fn strictly_decreases_somewhere(&self) -> bool {
        self.before.iter().zip(&self.after).any(|(b, a)| a < b)
    }
}

pub fn distance_profile(step: &FoldingStep) -> Result<DistanceProfile> {
    let pcfg = &step.before;
    let ctx = pcfg.ctx();
    let tree = reduced_convex_hull(pcfg)?;
    let t = tilde_d_j_of_i(pcfg, step.i, step.j)?;
    let c_i = pcfg.pair(step.i).0.finite().expect("a_i is finite").clone();
    let below = ValRat::Finite(t.radius);
    let moved = |d: &Disc| d.radius > t.radius && ctx.dist(&d.center, &c_i) > below;
    let discs: Vec<Disc> = tree.distinguished().map(|v| v.disc.clone()).collect();
    let images: Vec<Disc> = discs
        .iter()
        .map(|d| {
            if moved(d) {
                d.transform(ctx, &step.map)
            } else {
                d.clone()
            }
        })
        .collect();
    let mut before = Vec::new();
    let mut after = Vec::new();
    for x in 0..discs.len() {
        for y in (x + 1)..discs.len() {
            before.push(delta(ctx, &discs[x], &discs[y]));
            after.push(delta(ctx, &images[x], &images[y]));
        }
    }
    Ok(DistanceProfile { before, after })
}
