//! Finding the unit and extracting a UHF certificate from a presentation.
//!
//! The extraction builds stages t = 0, 1, … of unital matrix units. Stage
//! t+1 must (1) contain the previous stage as E_{n_t,n_{t+1}}, and
//! (2) approximate the first t+1 rational points ρ_0 … ρ_t to within
//! 2^-k_{t+1}. Candidate systems come from the realization of the
//! presentation (a guided construction); every claim about them is then
//! certified through the norm oracle or checked exactly.

use super::certificate::{DimsRule, Embedding, UhfCertificate};
use crate::cstar::{embed, rational_point_u64, Amplified, CPres, CPresentation, ComputablePoint, Elem, StarPoly, StarRing};
use crate::effective_sets::{
    ce_closed_from_relations, certify_below, matrix_unit_relations, mvn_semidecide, round_to_projection_points, Ball,
    CeClosedSet, ChainCertificate, MvnVerdict, Tri,
};
use crate::error::{Error, Result};
use crate::exact::{pow2, ExactMatrix, GaussianRational};
use crate::fuel::Fuel;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// The realization of p as a single square block.
fn single(a: &dyn CPresentation, p: &StarPoly) -> Option<ExactMatrix> {
    match a.realize(p)? {
        Elem::Blocks(mut b) if b.len() == 1 => b.pop(),
        _ => None,
    }
}

fn is_exact_projection(a: &dyn CPresentation, p: &StarPoly) -> bool {
    match a.realize(p) {
        Some(e) => e.mul(&e).sub(&e).is_zero() && e.sub(&e.adjoint()).is_zero(),
        None => false,
    }
}

/// Outcome of [`find_unit`].
#[derive(Clone, Debug)]
pub enum UnitSearch {
    Found { point: StarPoly, handle: ComputablePoint, certificate: Option<ChainCertificate>, tried: usize },
    Unknown { fuel: u64 },
}

/// Searches for 1_A given a projection `label` of M_n(A) whose class is
/// [1_A]. Candidates are exact projections of A (the presentation's own
/// unit first, then rational points and their spectral roundings); one is
/// accepted when the chain search shows it equivalent to `label`. A is
/// assumed stably finite, so any projection equivalent to 1 is 1.
pub fn find_unit(a: &CPres, n: usize, label: &ComputablePoint, fuel: u64) -> Result<UnitSearch> {
    let amp = Amplified { base: a.clone(), n };
    let mut f = Fuel::new(fuel);
    let mut seen = BTreeSet::new();
    let mut tried = 0;
    let mut i = 0u64;
    let mut queue: Vec<StarPoly> = a.unit().into_iter().collect();
    while !f.exhausted() {
        if queue.is_empty() {
            let rp = rational_point_u64(i);
            i += 1;
            if is_exact_projection(&**a, &rp) {
                queue.push(rp.clone());
            }
            queue.extend(round_to_projection_points(&**a, &rp));
            if !f.burn(1) {
                break;
            }
            continue;
        }
        let q = queue.remove(0);
        if q.is_zero() && a.zero_elem().map_or(true, |z| z.block_count() > 0) || !seen.insert(q.to_string()) {
            continue;
        }
        if !is_exact_projection(&**a, &q) {
            continue;
        }
        tried += 1;
        let per = f.remaining().min(20_000);
        let padded = ComputablePoint::constant(amp.place(&q, 0, 0));
        match mvn_semidecide(a, n, &padded, label, per)? {
            MvnVerdict::Equivalent(c) => {
                return Ok(UnitSearch::Found {
                    handle: ComputablePoint::constant(q.clone()),
                    point: q,
                    certificate: Some(c),
                    tried,
                })
            }
            MvnVerdict::Unknown { fuel: spent } => {
                f.burn(spent.max(1));
            }
        }
    }
    Ok(UnitSearch::Unknown { fuel: f.spent() })
}

/// Glimm modulus used only for reporting: given ε and n, a δ such that a
/// δ-approximate system of n×n matrix units is ε-close to an exact one.
pub type GlimmModulus = Arc<dyn Fn(&BigRational, u64) -> BigRational + Send + Sync>;

pub fn default_glimm() -> GlimmModulus {
    Arc::new(|eps, n| eps / BigRational::from_integer((8 * n * n).into()))
}

#[derive(Clone)]
pub struct ExtractConfig {
    pub stages: usize,
    pub fuel: u64,
    /// How many special points are realized to learn the matrix sizes the
    /// presentation uses.
    pub probe: u64,
    /// Matrix-unit relations are re-checked through the c.e. closed set
    /// machinery up to this size.
    pub relation_check_limit: u64,
    pub glimm: GlimmModulus,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig { stages: 5, fuel: 1_000_000, probe: 4096, relation_check_limit: 4, glimm: default_glimm() }
    }
}

/// ‖ρ_n − Σ α g^{(t')}‖ at a completed stage, against its bound 2^-t'.
#[derive(Clone, Debug)]
pub struct Inv1Check {
    pub point: usize,
    pub stage: usize,
    pub residual: BigRational,
    pub bound: BigRational,
}

#[derive(Clone, Debug)]
pub struct StageReport {
    pub stage: usize,
    pub dim: u64,
    pub k: u32,
    /// Every old unit equals the sum of the new units along the diagonal
    /// copies, checked on realizations.
    pub inv2_exact: bool,
    pub relations_checked: bool,
    pub inv1: Vec<Inv1Check>,
    pub glimm_delta: BigRational,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub certificate: UhfCertificate,
    pub reports: Vec<StageReport>,
    pub complete: bool,
    pub diagnostics: Vec<String>,
    pub fuel_spent: u64,
}

impl fmt::Display for StageReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let worst = self.inv1.iter().map(|c| &c.residual).max().cloned().unwrap_or_else(BigRational::zero);
        write!(
            f,
            "stage {}: n = {}, k = {}, inv2 exact = {}, relations = {}, inv1 checks = {} (max residual {}), glimm delta = {}",
            self.stage,
            self.dim,
            self.k,
            self.inv2_exact,
            self.relations_checked,
            self.inv1.len(),
            worst,
            self.glimm_delta
        )
    }
}

struct Stage {
    n: u64,
    units: Vec<StarPoly>,
}

/// Builds `cfg.stages` stages after stage 0 = {unit}. Stops early with a
/// partial certificate and diagnostics when a stage cannot be certified.
pub fn extract_certificate(a: &CPres, unit: &StarPoly, cfg: &ExtractConfig) -> Result<Extraction> {
    let mut fuel = Fuel::new(cfg.fuel);
    let mut diagnostics = Vec::new();
    let mut reports = Vec::new();
    if !is_exact_projection(&**a, unit) {
        return Err(Error::Input("the unit handle is not an exact projection of the realization".into()));
    }
    let mut stages = vec![Stage { n: 1, units: vec![unit.clone()] }];
    // α^{(n,t')}: coefficients of ρ_n over stage t', as dense matrices
    let mut alpha: BTreeMap<(usize, usize), ExactMatrix> = BTreeMap::new();
    let unit_size = single(&**a, unit).map(|m| m.rows()).unwrap_or(1);
    let mut sizes = BTreeSet::new();
    for i in 0..cfg.probe {
        if let Some(Elem::Blocks(b)) = a.special(i) {
            if b.len() == 1 {
                sizes.insert(b[0].rows());
            }
        }
    }
    sizes.insert(unit_size);

    let mut complete = true;
    for t in 0..cfg.stages {
        match next_stage(a, &stages, &mut alpha, &sizes, t, cfg, &mut fuel) {
            Ok((stage, report)) => {
                stages.push(stage);
                reports.push(report);
            }
            Err(msg) => {
                diagnostics.push(format!("stage {}: {msg}", t + 1));
                complete = false;
                break;
            }
        }
    }
    let dims = DimsRule::Explicit(stages.iter().map(|s| BigUint::from(s.n)).collect());
    let units = stages.into_iter().map(|s| s.units).collect();
    let certificate = UhfCertificate { dims: Arc::new(super::certificate::Dims::new(dims)?), embedding: Embedding::Units(Arc::new(units)) };
    Ok(Extraction { certificate, reports, complete, diagnostics, fuel_spent: fuel.spent() })
}

fn upper_norm(a: &dyn CPresentation, p: &StarPoly, k: u32) -> Option<BigRational> {
    if p.is_zero() {
        return Some(BigRational::zero());
    }
    a.norm_query(p, k).upper().cloned()
}

/// Smallest k with 2^k ≥ x.
fn log2_ceil(x: &BigRational) -> u32 {
    let mut k = 0u32;
    let mut p = BigRational::one();
    while &p < x {
        p = p * BigRational::from_integer(2.into());
        k += 1;
    }
    k
}

fn combination(units: &[StarPoly], coeffs: &ExactMatrix) -> StarPoly {
    let n = coeffs.rows();
    let mut out = StarPoly::zero();
    for r in 0..n {
        for s in 0..n {
            let z = coeffs.get(r, s);
            if !z.is_zero() {
                out = out.add(&units[r * n + s].scale(z));
            }
        }
    }
    out
}

fn certified(a: &dyn CPresentation, p: &StarPoly, bound: &BigRational, fuel: &mut Fuel) -> std::result::Result<(), String> {
    match certify_below(a, p, bound, fuel) {
        Tri::Yes => Ok(()),
        Tri::No => Err(format!("‖{p}‖ < {bound} fails")),
        Tri::Unknown { fuel } => Err(format!("fuel exhausted after {fuel} steps")),
    }
}

#[allow(clippy::too_many_arguments)]
fn next_stage(
    a: &CPres,
    stages: &[Stage],
    alpha: &mut BTreeMap<(usize, usize), ExactMatrix>,
    sizes: &BTreeSet<usize>,
    t: usize,
    cfg: &ExtractConfig,
    fuel: &mut Fuel,
) -> std::result::Result<(Stage, StageReport), String> {
    let a_ref: &dyn CPresentation = &**a;
    let cur = &stages[t];
    let nt = cur.n as usize;
    let rhos: Vec<StarPoly> = (0..=t as u64).map(rational_point_u64).collect();

    // precision schedule from the norms of the ρ_n and the approximation gaps
    let mut x = BigRational::from_integer(BigUint::from(nt).into()) * pow2(t as i64 + 1);
    for n in 0..t {
        for tp in n + 1..=t {
            let gap_bound = pow2(-(tp as i64));
            let rho_norm = upper_norm(a_ref, &rhos[n], 8).ok_or("no norm bound for a rational point")?;
            let resid = upper_norm(a_ref, &rhos[n].sub(&combination(&stages[tp].units, &alpha[&(n, tp)])), tp as u32 + 8)
                .ok_or("no residual bound")?;
            let gap = &gap_bound - &resid;
            if gap <= BigRational::zero() {
                return Err(format!("approximation gap for ρ_{n} at stage {tp} is not positive"));
            }
            let ntp = BigRational::from_integer(stages[tp].n.into());
            x = x * BigRational::from_integer(nt.into()) * ntp * (rho_norm + gap_bound + BigRational::one()) / gap;
        }
    }
    let k = log2_ceil(&x).max(t as u32 + 1);
    let eps = pow2(-(k as i64));

    // realizations that must fit in the new stage
    let realize = |p: &StarPoly| single(a_ref, p).ok_or_else(|| format!("no single-block realization of {p}"));
    let rho_m: Vec<ExactMatrix> = rhos.iter().map(&realize).collect::<std::result::Result<_, _>>()?;
    let g_m: Vec<ExactMatrix> = cur.units.iter().map(&realize).collect::<std::result::Result<_, _>>()?;
    let need = rho_m.iter().chain(&g_m).map(|m| m.rows()).fold(1, lcm);
    let big = sizes.iter().copied().find(|&s| s > nt && s % need == 0 && s % nt == 0);
    let size = match big {
        Some(s) => s,
        None if need <= nt.max(1) && nt % need == 0 => nt,
        None => return Err(format!("no realized matrix size is a multiple of {need} above {nt}")),
    };
    let m = size / nt;

    // guided partial permutation: S0 = diagonal support of G_00,
    // f(r + j n_t) = row hit by G_r0 on the j-th basis vector of S0
    let g: Vec<ExactMatrix> = g_m.iter().map(|x| embed(x, size)).collect();
    let one = GaussianRational::one();
    let s0: Vec<usize> = (0..size).filter(|&i| g[0].get(i, i) == &one).collect();
    if s0.len() != m {
        return Err(format!("the (0,0) unit has rank {} instead of {m}", s0.len()));
    }
    let mut f = vec![usize::MAX; size];
    for r in 0..nt {
        let gr0 = &g[r * nt];
        for (j, &i) in s0.iter().enumerate() {
            let hits: Vec<usize> = (0..size).filter(|&row| !gr0.get(row, i).is_zero()).collect();
            if hits.len() != 1 || gr0.get(hits[0], i) != &one {
                return Err("stage units are not a partial permutation in the realization".into());
            }
            f[r + j * nt] = hits[0];
        }
    }
    let image: BTreeSet<usize> = f.iter().copied().collect();
    if image.len() != size || image.iter().any(|&x| x >= size) {
        return Err("stage units do not cover the realization".into());
    }

    let mut units = Vec::with_capacity(size * size);
    for r in 0..size {
        for s in 0..size {
            let e = Elem::Blocks(vec![ExactMatrix::unit(size, f[r], f[s])]);
            let p = a.lift(&e).ok_or("the presentation cannot lift matrix units")?;
            // the lift must realize exactly the intended unit
            if realize(&p).map(|x| embed(&x, size)) != Ok(ExactMatrix::unit(size, f[r], f[s])) {
                return Err(format!("lift of E_({r},{s}) realizes something else"));
            }
            units.push(p);
        }
        if !fuel.burn(1) {
            return Err(format!("fuel exhausted after {} steps", fuel.spent()));
        }
    }

    // the new units realize E_{f(r), f(s)} for a bijection f, hence are
    // exact unital matrix units; small sizes are re-checked as a relation set
    let mut relations_checked = false;
    if (size as u64) <= cfg.relation_check_limit {
        let rel = ce_closed_from_relations(a.clone(), matrix_unit_relations(size, Some(stages[0].units[0].clone())));
        match rel.meets(&Ball::new(units.clone(), eps.clone()), fuel) {
            Tri::Yes => relations_checked = true,
            Tri::No => return Err("matrix-unit relations fail near the candidate".into()),
            Tri::Unknown { fuel } => return Err(format!("relation check ran out of fuel after {fuel} steps")),
        }
    }

    // (U2) old units are sums of new ones along the diagonal copies
    let diag_sum = |r: usize, s: usize| {
        let mut out = StarPoly::zero();
        for j in 0..m {
            out = out.add(&units[(r + j * nt) * size + (s + j * nt)]);
        }
        out
    };
    for r in 0..nt {
        for s in 0..nt {
            certified(a_ref, &cur.units[r * nt + s].sub(&diag_sum(r, s)), &eps, fuel)?;
        }
    }
    // (U1) the ρ_n for n ≤ t lie near the span of the new units
    for (n, rm) in rho_m.iter().enumerate() {
        let rm = embed(rm, size);
        let mut coeffs = ExactMatrix::zeros(size, size);
        for r in 0..size {
            for s in 0..size {
                coeffs.set(r, s, rm.get(f[r], f[s]).clone());
            }
        }
        let bound = eps.clone().min(pow2(-(t as i64 + 1)));
        certified(a_ref, &rhos[n].sub(&combination(&units, &coeffs)), &bound, fuel)?;
        alpha.insert((n, t + 1), coeffs);
    }

    // nesting for every earlier stage, exactly on realizations
    let mut inv2_exact = true;
    let all: Vec<&[StarPoly]> = stages.iter().map(|s| &s.units[..]).chain(std::iter::once(&units[..])).collect();
    let dims: Vec<usize> = stages.iter().map(|s| s.n as usize).chain(std::iter::once(size)).collect();
    for j in 0..=t {
        let (nj, nn) = (dims[j], dims[j + 1]);
        for r in 0..nj {
            for s in 0..nj {
                let mut sum = StarPoly::zero();
                for l in 0..nn / nj {
                    sum = sum.add(&all[j + 1][(r + l * nj) * nn + (s + l * nj)]);
                }
                let lhs = realize(&all[j][r * nj + s])?;
                let rhs = realize(&sum).unwrap_or_else(|_| ExactMatrix::zeros(1, 1));
                let common = lcm(lhs.rows(), rhs.rows()).max(size);
                if embed(&lhs, common) != embed(&rhs, common) {
                    inv2_exact = false;
                }
            }
        }
    }
    if !inv2_exact {
        return Err("stage nesting fails on realizations".into());
    }

    // approximation for n < t' ≤ t+1
    let mut inv1 = Vec::new();
    for tp in 1..=t + 1 {
        let us: &[StarPoly] = all[tp];
        for n in 0..tp {
            let Some(c) = alpha.get(&(n, tp)) else { continue };
            let res = rhos.get(n).cloned().unwrap_or_else(|| rational_point_u64(n as u64));
            let residual = upper_norm(a_ref, &res.sub(&combination(us, c)), tp as u32 + 8).ok_or("no residual bound")?;
            let bound = pow2(-(tp as i64));
            if residual >= bound {
                return Err(format!("approximation fails for ρ_{n} at stage {tp}"));
            }
            inv1.push(Inv1Check { point: n, stage: tp, residual, bound });
        }
    }

    let report = StageReport {
        stage: t + 1,
        dim: size as u64,
        k,
        inv2_exact,
        relations_checked,
        inv1,
        glimm_delta: (cfg.glimm)(&eps, size as u64),
    };
    Ok((Stage { n: size as u64, units }, report))
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a / gcd(a, b) * b
    }
}
