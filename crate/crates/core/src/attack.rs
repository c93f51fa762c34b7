//! Linear attacks on the authentication code.
//!
//! Two things break the code. First, an affine F_q-combination of tagged
//! packets is itself a correctly tagged packet (for the combined payload), so
//! anyone who has decoded the batch can substitute or pollute without touching
//! a key. Second, a coalition of `K <= k - 1` verifiers can write down the
//! linear system its view imposes on the source key `A`. That system always
//! has exactly `q^(l (M+1-r_0)(k-K))` solutions, where `r_0` is the rank of
//! the coalition's observation matrix, whatever the number of observed edges.
//!
//! The unknown vector orders the key column by column:
//! `(a_{0,1}, a_{1,1}, ..., a_{M,1}, a_{0,2}, ..., a_{M,k})`.

use std::sync::Arc;

use num_bigint::BigUint;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::auth::{combine, frobenius_weights, moore_matrix, SystemParams, TaggedPacket, VerifierKey};
use crate::error::{Error, Result};
use crate::field::{ExtField, Fel};
use crate::linalg::{solve, solve_count, Matrix, SolveCount};
use crate::net::{check_affine, CoalitionView};

/// Default ceiling on the number of candidate keys the brute-force counter visits.
pub const DEFAULT_GUARD: u64 = 1 << 24;

/// Coefficients `a_1..a_n` over F_q with `sum a_i = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ForgerySpec {
    coeffs: Vec<u32>,
}

impl ForgerySpec {
    pub fn new(q: u32, coeffs: Vec<u32>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::AttackSpec("forgery needs at least one coefficient".into()));
        }
        check_affine(q, coeffs.len(), &coeffs)?;
        Ok(Self { coeffs })
    }

    /// Uniform among affine coefficient vectors of length `n`.
    pub fn random<R: Rng + ?Sized>(q: u32, n: usize, rng: &mut R) -> Self {
        assert!(n > 0, "forgery needs at least one coefficient");
        let mut coeffs: Vec<u32> = (0..n - 1).map(|_| rng.gen_range(0..q)).collect();
        let partial = coeffs.iter().map(|&c| c as u64).sum::<u64>() % q as u64;
        coeffs.push(((1 + q as u64 - partial) % q as u64) as u32);
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// True when the combination just returns one of its inputs.
    pub fn is_unit(&self) -> bool {
        self.coeffs.iter().filter(|&&c| c != 0).count() == 1
    }
}

/// `sum a_i x_i` over source packets `x_i = [1, s_i, A_{s_i}]`.
///
/// The result is the honest packet for `sum a_i s_i`, tag included.
pub fn forge(field: &ExtField, packets: &[TaggedPacket], spec: &ForgerySpec) -> Result<TaggedPacket> {
    if packets.len() != spec.coeffs.len() {
        return Err(Error::AttackSpec(format!(
            "{} coefficients for {} packets",
            spec.coeffs.len(),
            packets.len()
        )));
    }
    if let Some(p) = packets.iter().find(|p| p.header != 1) {
        return Err(Error::AttackSpec(format!(
            "forgery expects source packets with header 1, got header {}",
            p.header
        )));
    }
    combine(field, packets, &spec.coeffs)
}

/// Affine coefficients taking `messages` to `target`, if `target` lies in
/// their affine F_q-span.
pub fn solve_target_coeffs(field: &ExtField, messages: &[Fel], target: Fel) -> Option<ForgerySpec> {
    if messages.is_empty() {
        return None;
    }
    let base = Arc::new(field.base_field());
    let l = field.degree();
    let coords: Vec<Vec<u32>> = messages.iter().map(|&s| field.to_vector(s)).collect();
    let mut rows: Vec<Vec<u32>> = (0..l).map(|r| coords.iter().map(|c| c[r]).collect()).collect();
    rows.push(vec![1; messages.len()]);
    let mut rhs: Vec<Vec<u32>> = field.to_vector(target).into_iter().map(|x| vec![x]).collect();
    rhs.push(vec![1]);
    let a = Matrix::from_base_rows(&base, messages.len(), &rows).ok()?;
    let b = Matrix::from_base_rows(&base, 1, &rhs).ok()?;
    let x = solve(&a, &b).ok()??;
    let coeffs = x.column(0).iter().map(|c| c.raw()).collect();
    Some(ForgerySpec { coeffs })
}

/// Sizes and ranks describing one key-recovery instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RecoveryMeta {
    /// `K`
    pub coalition: usize,
    /// `k`
    pub poly_len: usize,
    /// `M`
    pub tag_dim: usize,
    /// `l`
    pub degree: usize,
    pub q: u32,
    /// Rank of the stacked observation matrix `(H_1 S_n; ...; H_K S_n)`.
    pub r0: usize,
    /// `H`: incoming edges summed over the coalition.
    pub h_total: usize,
    /// `n`
    pub messages: usize,
}

/// The coalition's linear system in the `k(M+1)` entries of `A`.
#[derive(Clone, Debug)]
pub struct RecoverySystem {
    pub coeff: Matrix,
    pub rhs: Matrix,
    pub observation: Matrix,
    pub meta: RecoveryMeta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HCondition {
    pub h_total: usize,
    pub tag_dim: usize,
    pub condition_held: bool,
}

/// Index of `a_{t,j}` in the unknown vector.
fn unknown(tag_dim: usize, t: usize, j: usize) -> usize {
    j * (tag_dim + 1) + t
}

/// Assembles the coalition's system.
///
/// Each observed packet `[c, m, T]` on an edge with global vector `h`
/// contributes the observation row `(c, m, m^q, ..., m^(q^(M-1)))`, which
/// equals `h S_n` because the Frobenius map is F_q-linear, and the
/// constants `T_0..T_(k-1)`. For every key column `j` the observation block
/// appears once (block diagonal). Every member then adds its `M+1` key
/// equations `sum_j x^j a_{t,j} = P_t(x)`.
pub fn build_recovery_system(
    params: &SystemParams,
    view: &CoalitionView,
    vkeys: &[VerifierKey],
) -> Result<RecoverySystem> {
    let f = params.field();
    let (k, m) = (params.poly_len(), params.tag_dim());
    let width = k * (m + 1);
    let mut members_keys = Vec::with_capacity(view.members.len());
    for member in &view.members {
        let v = member.verifier.ok_or_else(|| {
            Error::Shape(format!("coalition node {} holds no verifier key", member.node))
        })?;
        let key = vkeys
            .iter()
            .find(|key| key.index == v)
            .ok_or_else(|| Error::Shape(format!("missing key for verifier {v}")))?;
        if key.evals.len() != m + 1 {
            return Err(Error::Shape(format!(
                "verifier {v} holds {} evaluations, expected {}",
                key.evals.len(),
                m + 1
            )));
        }
        if member.packets.len() != member.kernel.rows() {
            return Err(Error::Shape(format!(
                "node {} has {} kernel rows but {} packets",
                member.node,
                member.kernel.rows(),
                member.packets.len()
            )));
        }
        members_keys.push(key);
    }

    let mut coeff_rows: Vec<Vec<Fel>> = Vec::new();
    let mut rhs_rows: Vec<Vec<Fel>> = Vec::new();
    let mut observation_rows: Vec<Vec<Fel>> = Vec::new();
    for member in &view.members {
        let observed: Vec<(Vec<Fel>, &TaggedPacket)> = member
            .packets
            .iter()
            .map(|p| {
                if p.tag.len() != k {
                    return Err(Error::Shape(format!(
                        "observed tag has {} coefficients, expected {k}",
                        p.tag.len()
                    )));
                }
                let mut row = frobenius_weights(f, p.payload, m);
                row[0] = f.from_base(p.header);
                Ok((row, p))
            })
            .collect::<Result<_>>()?;
        for j in 0..k {
            for (d_row, p) in &observed {
                let mut row = vec![Fel::ZERO; width];
                for (t, &d) in d_row.iter().enumerate() {
                    row[unknown(m, t, j)] = d;
                }
                coeff_rows.push(row);
                rhs_rows.push(vec![p.tag[j]]);
            }
        }
        observation_rows.extend(observed.into_iter().map(|(row, _)| row));
    }
    for key in &members_keys {
        for t in 0..=m {
            let mut row = vec![Fel::ZERO; width];
            let mut power = f.one();
            for j in 0..k {
                row[unknown(m, t, j)] = power;
                power = f.mul(power, key.point);
            }
            coeff_rows.push(row);
            rhs_rows.push(vec![key.evals[t]]);
        }
    }

    let coeff = Matrix::from_rows(f, width, &coeff_rows)?;
    let rhs = Matrix::from_rows(f, 1, &rhs_rows)?;
    let observation = Matrix::from_rows(f, m + 1, &observation_rows)?;
    let meta = RecoveryMeta {
        coalition: view.members.len(),
        poly_len: k,
        tag_dim: m,
        degree: f.degree(),
        q: f.characteristic(),
        r0: observation.rank(),
        h_total: view.h_total,
        messages: params.messages(),
    };
    Ok(RecoverySystem {
        coeff,
        rhs,
        observation,
        meta,
    })
}

/// `(H_1; ...; H_K) S_n`, computed from the global kernels and the messages.
pub fn observation_from_kernels(
    field: &Arc<ExtField>,
    view: &CoalitionView,
    messages: &[Fel],
    tag_dim: usize,
) -> Result<Matrix> {
    let h = view.stacked_kernel();
    let lifted = Matrix::from_base_rows(field, h.cols(), &h.to_raw_rows())?;
    lifted.mul(&moore_matrix(field, messages, tag_dim))
}

fn check_hypothesis(meta: &RecoveryMeta) -> Result<()> {
    if meta.coalition == 0 || meta.coalition >= meta.poly_len {
        return Err(Error::Hypothesis(format!(
            "coalition size K = {} must satisfy 1 <= K <= k - 1 = {}",
            meta.coalition,
            meta.poly_len - 1
        )));
    }
    if meta.r0 > meta.tag_dim + 1 {
        return Err(Error::Hypothesis(format!("r_0 = {} exceeds M + 1", meta.r0)));
    }
    Ok(())
}

/// `r_0 k + (M + 1 - r_0) K`.
pub fn predicted_rank(meta: &RecoveryMeta) -> Result<usize> {
    check_hypothesis(meta)?;
    Ok(meta.r0 * meta.poly_len + (meta.tag_dim + 1 - meta.r0) * meta.coalition)
}

/// `q^(l (M + 1 - r_0)(k - K))`.
pub fn predicted_count(meta: &RecoveryMeta) -> Result<BigUint> {
    check_hypothesis(meta)?;
    let exponent = meta.degree * (meta.tag_dim + 1 - meta.r0) * (meta.poly_len - meta.coalition);
    Ok(BigUint::from(meta.q).pow(exponent as u32))
}

/// Solution count by elimination.
pub fn gauss_count(system: &RecoverySystem) -> Result<SolveCount> {
    solve_count(&system.coeff, &system.rhs)
}

pub fn h_condition_report(meta: &RecoveryMeta) -> HCondition {
    HCondition {
        h_total: meta.h_total,
        tag_dim: meta.tag_dim,
        condition_held: meta.h_total <= meta.tag_dim,
    }
}

/// Counts keys satisfying every equation of `system` by visiting all
/// `(q^l)^(k(M+1))` candidates. No elimination is involved.
///
/// Candidates are walked as an odometer over the F_q-coordinates of the
/// unknowns. Bumping one coordinate adds a fixed column to the residual
/// `coeff * a - rhs`, so each step updates the residual instead of
/// re-evaluating it. The top coordinates are split across threads.
pub fn brute_force_count(system: &RecoverySystem, guard: u64) -> Result<BigUint> {
    let coeff = &system.coeff;
    let f = coeff.field().as_ref();
    let unknowns = coeff.cols();
    let total = (f.order() as u128).checked_pow(unknowns as u32);
    match total {
        Some(t) if t <= guard as u128 => {}
        _ => {
            return Err(Error::Resource(format!(
                "{}^{unknowns} candidate keys exceed the guard {guard}",
                f.order()
            )))
        }
    }
    let q = f.characteristic();
    let l = f.degree();
    let rows = coeff.rows();
    // One step vector per (unknown, coordinate): column u of coeff times w^b.
    let mut steps: Vec<Vec<Fel>> = Vec::with_capacity(unknowns * l);
    for u in 0..unknowns {
        for b in 0..l {
            let mut unit = vec![0u32; l];
            unit[b] = 1;
            let w_b = f.from_vector(&unit).expect("unit vector");
            steps.push((0..rows).map(|r| f.mul(coeff.get(r, u), w_b)).collect());
        }
    }
    let start: Vec<Fel> = (0..rows).map(|r| f.neg(system.rhs.get(r, 0))).collect();
    let digits = steps.len();
    if digits == 0 {
        return Ok(BigUint::from(u64::from(start.iter().all(|x| x.is_zero()))));
    }

    // Fix the top `split` digits per task.
    let mut split = 0;
    while split < digits && (q as u64).pow(split as u32) < 256 {
        split += 1;
    }
    let low = digits - split;
    let prefixes = (q as u64).pow(split as u32);
    let count: u64 = (0..prefixes)
        .into_par_iter()
        .map(|prefix| {
            let mut residual = start.clone();
            let mut p = prefix;
            for step in &steps[low..digits] {
                let times = p % q as u64;
                p /= q as u64;
                for _ in 0..times {
                    add_into(f, &mut residual, step);
                }
            }
            count_low(f, q, &steps[..low], residual)
        })
        .sum();
    Ok(BigUint::from(count))
}

fn add_into(f: &ExtField, acc: &mut [Fel], v: &[Fel]) {
    for (a, &b) in acc.iter_mut().zip(v) {
        *a = f.add(*a, b);
    }
}

fn count_low(f: &ExtField, q: u32, steps: &[Vec<Fel>], mut residual: Vec<Fel>) -> u64 {
    let mut nonzero = residual.iter().filter(|x| !x.is_zero()).count();
    let mut digits = vec![0u32; steps.len()];
    let mut count = u64::from(nonzero == 0);
    loop {
        // Increment the odometer; every digit that moves shifts by +1 mod q.
        let mut d = 0;
        loop {
            if d == steps.len() {
                return count;
            }
            for (r, &s) in residual.iter_mut().zip(&steps[d]) {
                if s.is_zero() {
                    continue;
                }
                let was_zero = r.is_zero();
                *r = f.add(*r, s);
                match (was_zero, r.is_zero()) {
                    (true, false) => nonzero += 1,
                    (false, true) => nonzero -= 1,
                    _ => {}
                }
            }
            digits[d] += 1;
            if digits[d] < q {
                break;
            }
            digits[d] = 0;
            d += 1;
        }
        if nonzero == 0 {
            count += 1;
        }
    }
}

impl RecoverySystem {
    /// Whether a concrete key matrix satisfies every equation.
    pub fn is_satisfied_by(&self, key: &Matrix) -> Result<bool> {
        let m = self.meta.tag_dim;
        if key.rows() != m + 1 || key.cols() != self.meta.poly_len {
            return Err(Error::Shape(format!(
                "key is {}x{}, expected {}x{}",
                key.rows(),
                key.cols(),
                m + 1,
                self.meta.poly_len
            )));
        }
        let f = self.coeff.field();
        let mut column = Matrix::zeros(f, self.coeff.cols(), 1);
        for j in 0..key.cols() {
            for t in 0..=m {
                column.set(unknown(m, t, j), 0, key.get(t, j));
            }
        }
        Ok(self.coeff.mul(&column)? == self.rhs)
    }

    /// Count of rows contributed by observations versus key equations.
    pub fn row_split(&self) -> (usize, usize) {
        let key_rows = self.meta.coalition * (self.meta.tag_dim + 1);
        (self.coeff.rows() - key_rows, key_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::auth::{distribute, SourceKey};
    use crate::net::MemberView;
    use num_traits::One;

    fn meta(q: u32, l: usize, k: usize, m: usize, coalition: usize, r0: usize) -> RecoveryMeta {
        RecoveryMeta {
            coalition,
            poly_len: k,
            tag_dim: m,
            degree: l,
            q,
            r0,
            h_total: 0,
            messages: 1,
        }
    }

    #[test]
    fn predicted_values() {
        assert_eq!(predicted_count(&meta(2, 1, 2, 1, 1, 0)).unwrap(), BigUint::from(4u32));
        assert_eq!(predicted_count(&meta(3, 2, 3, 2, 1, 3)).unwrap(), BigUint::one());
        // K = k - 1 reduces the exponent to l (M + 1 - r_0).
        assert_eq!(predicted_count(&meta(3, 2, 3, 2, 2, 1)).unwrap(), BigUint::from(81u32));
        assert_eq!(predicted_rank(&meta(2, 1, 3, 2, 1, 1)).unwrap(), 3 + 2);
        assert!(matches!(predicted_count(&meta(2, 1, 2, 1, 2, 0)), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn h_condition_boundaries() {
        let mut m = meta(2, 1, 3, 2, 1, 0);
        assert!(h_condition_report(&m).condition_held);
        m.h_total = 2;
        assert!(h_condition_report(&m).condition_held);
        m.h_total = 4;
        assert!(!h_condition_report(&m).condition_held);
    }

    #[test]
    fn forgery_spec_validation() {
        assert!(ForgerySpec::new(3, vec![2, 2]).is_ok());
        assert!(matches!(ForgerySpec::new(3, vec![1, 1]), Err(Error::AttackSpec(_))));
        assert!(matches!(ForgerySpec::new(3, vec![]), Err(Error::AttackSpec(_))));
        let mut rng = crate::rng::substream(1, crate::rng::Stream::Coefficients);
        for _ in 0..50 {
            let s = ForgerySpec::random(5, 4, &mut rng);
            assert!(ForgerySpec::new(5, s.coeffs().to_vec()).is_ok());
        }
    }

    fn key_only_system(q: u32, l: usize, k: usize, m: usize) -> (RecoverySystem, SourceKey) {
        let f = Arc::new(ExtField::new(q, l).unwrap());
        let params = SystemParams::new(f.clone(), k, m, 1, vec![f.one()], false).unwrap();
        let (key, vkeys) = crate::auth::keygen(&params, 9);
        let view = CoalitionView {
            members: vec![MemberView {
                node: 0,
                verifier: Some(0),
                kernel: Matrix::zeros(&Arc::new(f.base_field()), 0, 1),
                packets: vec![],
            }],
            h_total: 0,
        };
        (build_recovery_system(&params, &view, &vkeys).unwrap(), key)
    }

    #[test]
    fn empty_observation_is_key_equations_only() {
        let (sys, key) = key_only_system(2, 1, 2, 1);
        assert_eq!(sys.meta.r0, 0);
        assert_eq!(sys.row_split(), (0, 2));
        assert!(sys.is_satisfied_by(key.matrix()).unwrap());
        assert_eq!(brute_force_count(&sys, DEFAULT_GUARD).unwrap(), BigUint::from(4u32));
        assert_eq!(gauss_count(&sys).unwrap().count, BigUint::from(4u32));
    }

    #[test]
    fn hand_assembled_observation() {
        let f = Arc::new(ExtField::new(2, 1).unwrap());
        let base = Arc::new(f.base_field());
        let params = SystemParams::new(f.clone(), 2, 1, 1, vec![f.one()], false).unwrap();
        let key = SourceKey::new(Matrix::from_base_rows(&f, 2, &[vec![1, 1], vec![0, 1]]).unwrap());
        let vkeys = distribute(&params, &key);
        let packet = key.tag(f.one());
        let view = CoalitionView {
            members: vec![MemberView {
                node: 0,
                verifier: Some(0),
                kernel: Matrix::from_base_rows(&base, 1, &[vec![1]]).unwrap(),
                packets: vec![packet],
            }],
            h_total: 1,
        };
        let sys = build_recovery_system(&params, &view, &vkeys).unwrap();
        assert_eq!(sys.observation.to_raw_rows(), vec![vec![1, 1]]);
        assert_eq!(sys.meta.r0, 1);
        assert!(sys.is_satisfied_by(key.matrix()).unwrap());
        let expected = observation_from_kernels(&f, &view, &[f.one()], 1).unwrap();
        assert_eq!(sys.observation, expected);
    }

    #[test]
    fn brute_force_guard() {
        let (sys, _) = key_only_system(3, 2, 4, 3);
        assert!(matches!(brute_force_count(&sys, DEFAULT_GUARD), Err(Error::Resource(_))));
    }

    #[test]
    fn targeted_coefficients() {
        let f = ExtField::new(3, 2).unwrap();
        let s = [f.from_vector(&[1, 0]).unwrap(), f.from_vector(&[0, 1]).unwrap(), f.zero()];
        let target = f.from_vector(&[2, 2]).unwrap();
        let spec = solve_target_coeffs(&f, &s, target).unwrap();
        let sum = spec.coeffs().iter().sum::<u32>() % 3;
        assert_eq!(sum, 1);
        let hit = f.sum(s.iter().zip(spec.coeffs()).map(|(&x, &a)| f.scale(a, x)));
        assert_eq!(hit, target);
        // A single message only reaches itself.
        assert!(solve_target_coeffs(&f, &s[..1], s[1]).is_none());
        assert_eq!(solve_target_coeffs(&f, &s[..1], s[0]).unwrap().coeffs(), &[1]);
    }
}
