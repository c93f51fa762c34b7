//! The multi-verifier authentication code for network-coded packets.
//!
//! A trusted authority draws `M + 1` polynomials `P_0..P_M` of degree below
//! `k` over F_{q^l}; their coefficient matrix `A` is the source key. Verifier
//! `i` holds the evaluations `P_t(x_i)` at a public nonzero point `x_i`.
//! A message `s` is sent as the packet `[1, s, A_s]`, where
//!
//! ```text
//! A_s(x) = P_0(x) + s P_1(x) + s^q P_2(x) + ... + s^(q^(M-1)) P_M(x)
//! ```
//!
//! and a verifier accepts `[c, m, T]` iff
//! `T(x_i) = c P_0(x_i) + sum_t m^(q^(t-1)) P_t(x_i)`.
//!
//! Since the header carries `c` and the Frobenius map fixes F_q, the
//! residual of that check is F_q-linear in the packet. Every F_q-combination
//! of valid packets verifies, which the `attack` module exploits.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{ExtField, Fel};
use crate::linalg::Matrix;
use crate::rng::{substream, Stream};

/// Public parameters of one deployment of the code.
#[derive(Clone, Debug)]
pub struct SystemParams {
    field: Arc<ExtField>,
    /// `k`: each `P_t` has `k` coefficients.
    poly_len: usize,
    /// `M`: number of Frobenius terms in a tag, also the per-key message budget.
    tag_dim: usize,
    /// `n`: messages in the batch.
    messages: usize,
    /// `x_1..x_V`.
    points: Vec<Fel>,
}

impl SystemParams {
    /// Validates and bundles the parameters. `n > M` is refused unless
    /// `allow_n_gt_m` is set, since a key only covers `M` messages.
    pub fn new(
        field: Arc<ExtField>,
        poly_len: usize,
        tag_dim: usize,
        messages: usize,
        points: Vec<Fel>,
        allow_n_gt_m: bool,
    ) -> Result<Self> {
        if poly_len < 2 {
            return Err(Error::Parameter(format!("k = {poly_len} must be at least 2")));
        }
        if tag_dim < 1 {
            return Err(Error::Parameter("M must be at least 1".into()));
        }
        if messages < 1 {
            return Err(Error::Parameter("n must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::Parameter("at least one verifier point is required".into()));
        }
        if messages > tag_dim && !allow_n_gt_m {
            return Err(Error::Parameter(format!(
                "n = {messages} exceeds M = {tag_dim}; pass the unsafe flag to allow it"
            )));
        }
        for (i, &x) in points.iter().enumerate() {
            field.element(x.raw())?;
            if x.is_zero() {
                return Err(Error::Parameter(format!("public point x_{} is zero", i + 1)));
            }
            if points[..i].contains(&x) {
                return Err(Error::Parameter(format!("public point x_{} repeats", i + 1)));
            }
        }
        Ok(Self {
            field,
            poly_len,
            tag_dim,
            messages,
            points,
        })
    }

    pub fn field(&self) -> &Arc<ExtField> {
        &self.field
    }

    pub fn poly_len(&self) -> usize {
        self.poly_len
    }

    pub fn tag_dim(&self) -> usize {
        self.tag_dim
    }

    pub fn messages(&self) -> usize {
        self.messages
    }

    pub fn verifiers(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Fel] {
        &self.points
    }

    /// Length of a flattened packet over F_q: `1 + l + k l`.
    pub fn flat_len(&self) -> usize {
        flat_len(&self.field, self.poly_len)
    }
}

/// `count` distinct nonzero points drawn from `rng`.
pub fn random_points<R: Rng + ?Sized>(field: &ExtField, count: usize, rng: &mut R) -> Result<Vec<Fel>> {
    if count as u64 >= field.order() {
        return Err(Error::Parameter(format!(
            "a field of order {} has fewer than {count} nonzero points",
            field.order()
        )));
    }
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let x = field.random_nonzero(rng);
        if !points.contains(&x) {
            points.push(x);
        }
    }
    Ok(points)
}

/// The coefficient matrix `A`: row `t` holds the `k` coefficients of `P_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceKey {
    coeffs: Matrix,
}

/// Verifier `index`'s share: its point and `(P_0(x_i), ..., P_M(x_i))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierKey {
    pub index: usize,
    pub point: Fel,
    pub evals: Vec<Fel>,
    field: Arc<ExtField>,
}

/// `[c, m, T]`: header in F_q, payload in F_{q^l}, and the `k` tag coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TaggedPacket {
    pub header: u32,
    pub payload: Fel,
    pub tag: Vec<Fel>,
}

impl SourceKey {
    pub fn new(coeffs: Matrix) -> Self {
        Self { coeffs }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn field(&self) -> &Arc<ExtField> {
        self.coeffs.field()
    }

    /// `M`.
    pub fn tag_dim(&self) -> usize {
        self.coeffs.rows() - 1
    }

    /// `k`.
    pub fn poly_len(&self) -> usize {
        self.coeffs.cols()
    }

    /// Coefficients of `P_t`, constant term first.
    pub fn poly(&self, t: usize) -> &[Fel] {
        self.coeffs.row(t)
    }

    /// Evaluations `(P_0(x), ..., P_M(x))` by Horner's rule.
    pub fn evaluate(&self, x: Fel) -> Vec<Fel> {
        let f = self.field();
        (0..self.coeffs.rows()).map(|t| f.eval_poly(self.poly(t), x)).collect()
    }

    /// Computes the tag of `s` and returns the packet `[1, s, A_s]`.
    pub fn tag(&self, s: Fel) -> TaggedPacket {
        let weights = frobenius_weights(self.field(), s, self.tag_dim());
        let tag = (0..self.poly_len())
            .map(|j| self.weighted_column(&weights, j))
            .collect();
        TaggedPacket {
            header: 1,
            payload: s,
            tag,
        }
    }

    /// Coefficient `j` of `A_s`, i.e. the functional `L_(j+1)(s) = sum_t phi_t(s) a_(t,j)`.
    pub fn tag_coefficient(&self, j: usize, s: Fel) -> Result<Fel> {
        if j >= self.poly_len() {
            return Err(Error::Parameter(format!(
                "tag coefficient index {j} out of range 0..{}",
                self.poly_len()
            )));
        }
        let weights = frobenius_weights(self.field(), s, self.tag_dim());
        Ok(self.weighted_column(&weights, j))
    }

    fn weighted_column(&self, weights: &[Fel], j: usize) -> Fel {
        let f = self.field();
        f.sum(weights.iter().enumerate().map(|(t, &w)| f.mul(w, self.coeffs.get(t, j))))
    }
}

/// `(1, s, s^q, ..., s^(q^(M-1)))`.
pub fn frobenius_weights(field: &ExtField, s: Fel, tag_dim: usize) -> Vec<Fel> {
    let mut out = Vec::with_capacity(tag_dim + 1);
    out.push(field.one());
    let mut power = s;
    for _ in 0..tag_dim {
        out.push(power);
        power = field.frobenius(power, 1);
    }
    out
}

/// Draws the source key from the `keys` substream of `seed` and hands out the verifier shares.
pub fn keygen(params: &SystemParams, seed: u64) -> (SourceKey, Vec<VerifierKey>) {
    let mut rng = substream(seed, Stream::Keys);
    let f = params.field();
    let rows = params.tag_dim() + 1;
    let data = (0..rows * params.poly_len()).map(|_| f.random(&mut rng)).collect();
    let coeffs = Matrix::from_vec(f, rows, params.poly_len(), data).expect("shape is exact");
    let key = SourceKey::new(coeffs);
    let vkeys = distribute(params, &key);
    (key, vkeys)
}

/// Verifier shares for an existing source key.
pub fn distribute(params: &SystemParams, key: &SourceKey) -> Vec<VerifierKey> {
    params
        .points()
        .iter()
        .enumerate()
        .map(|(index, &point)| VerifierKey {
            index,
            point,
            evals: key.evaluate(point),
            field: Arc::clone(params.field()),
        })
        .collect()
}

impl VerifierKey {
    pub fn new(field: Arc<ExtField>, index: usize, point: Fel, evals: Vec<Fel>) -> Self {
        Self {
            index,
            point,
            evals,
            field,
        }
    }

    /// `T(x_i) - c P_0(x_i) - sum_t m^(q^(t-1)) P_t(x_i)`.
    pub fn residual(&self, packet: &TaggedPacket) -> Fel {
        let f = &self.field;
        let lhs = f.eval_poly(&packet.tag, self.point);
        let weights = frobenius_weights(f, packet.payload, self.evals.len() - 1);
        let expected = f.sum(
            std::iter::once(f.mul(f.from_base(packet.header), self.evals[0])).chain(
                weights
                    .iter()
                    .zip(&self.evals)
                    .skip(1)
                    .map(|(&w, &e)| f.mul(w, e)),
            ),
        );
        f.sub(lhs, expected)
    }

    pub fn verify(&self, packet: &TaggedPacket) -> bool {
        self.residual(packet).is_zero()
    }
}

impl TaggedPacket {
    pub fn zero(poly_len: usize) -> Self {
        Self {
            header: 0,
            payload: Fel::ZERO,
            tag: vec![Fel::ZERO; poly_len],
        }
    }

    /// An all-zero packet verifies everywhere and carries no information.
    pub fn is_zero(&self) -> bool {
        self.header == 0 && self.payload.is_zero() && self.tag.iter().all(|t| t.is_zero())
    }

    /// `[c] ++ vec(m) ++ vec(T_0) ++ ... ++ vec(T_(k-1))` over F_q.
    pub fn flatten(&self, field: &ExtField) -> Vec<u32> {
        let mut out = Vec::with_capacity(flat_len(field, self.tag.len()));
        out.push(self.header % field.characteristic());
        out.extend(field.to_vector(self.payload));
        for &t in &self.tag {
            out.extend(field.to_vector(t));
        }
        out
    }

    /// Inverse of [`TaggedPacket::flatten`].
    pub fn parse(field: &ExtField, poly_len: usize, flat: &[u32]) -> Result<Self> {
        let expected = flat_len(field, poly_len);
        if flat.len() != expected {
            return Err(Error::Shape(format!(
                "flat packet has {} symbols, expected {expected}",
                flat.len()
            )));
        }
        let q = field.characteristic();
        if flat[0] >= q {
            return Err(Error::Parameter(format!("header {} not reduced mod {q}", flat[0])));
        }
        let l = field.degree();
        let mut chunks = flat[1..].chunks(l);
        let payload = field.from_vector(chunks.next().expect("length checked"))?;
        let tag = chunks.map(|c| field.from_vector(c)).collect::<Result<Vec<_>>>()?;
        Ok(Self {
            header: flat[0],
            payload,
            tag,
        })
    }
}

pub fn flat_len(field: &ExtField, poly_len: usize) -> usize {
    1 + field.degree() * (1 + poly_len)
}

/// `sum_i coeffs[i] * packets[i]` with base-field coefficients.
pub fn combine(field: &ExtField, packets: &[TaggedPacket], coeffs: &[u32]) -> Result<TaggedPacket> {
    if packets.len() != coeffs.len() {
        return Err(Error::Shape(format!(
            "{} packets but {} coefficients",
            packets.len(),
            coeffs.len()
        )));
    }
    let Some(first) = packets.first() else {
        return Err(Error::Shape("cannot combine an empty packet list".into()));
    };
    let k = first.tag.len();
    if packets.iter().any(|p| p.tag.len() != k) {
        return Err(Error::Shape("packets have different tag lengths".into()));
    }
    let q = field.characteristic() as u64;
    let mut out = TaggedPacket::zero(k);
    for (p, &a) in packets.iter().zip(coeffs) {
        let a = a % field.characteristic();
        if a == 0 {
            continue;
        }
        out.header = ((out.header as u64 + a as u64 * p.header as u64) % q) as u32;
        out.payload = field.add(out.payload, field.scale(a, p.payload));
        for (o, &t) in out.tag.iter_mut().zip(&p.tag) {
            *o = field.add(*o, field.scale(a, t));
        }
    }
    Ok(out)
}

/// The `n x (M+1)` matrix with rows `(1, s_j, s_j^q, ..., s_j^(q^(M-1)))`.
pub fn moore_matrix(field: &Arc<ExtField>, messages: &[Fel], tag_dim: usize) -> Matrix {
    let rows: Vec<Vec<Fel>> = messages
        .iter()
        .map(|&s| frobenius_weights(field, s, tag_dim))
        .collect();
    Matrix::from_rows(field, tag_dim + 1, &rows).expect("rows have M+1 entries")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<ExtField> {
        Arc::new(ExtField::new(2, 1).unwrap())
    }

    /// P_0 = 1 + x, P_1 = x over F_2.
    fn small_key() -> SourceKey {
        let f = f2();
        SourceKey::new(Matrix::from_base_rows(&f, 2, &[vec![1, 1], vec![0, 1]]).unwrap())
    }

    #[test]
    fn hand_evaluated_shares() {
        let f = f2();
        let params = SystemParams::new(f.clone(), 2, 1, 1, vec![f.one()], false).unwrap();
        let vkeys = distribute(&params, &small_key());
        assert_eq!(vkeys[0].evals, vec![Fel::ZERO, f.one()]);
    }

    #[test]
    fn hand_computed_tag() {
        let f = f2();
        let key = small_key();
        let p = key.tag(f.one());
        assert_eq!(p.header, 1);
        assert_eq!(p.payload, f.one());
        assert_eq!(p.tag, vec![f.one(), Fel::ZERO]);
        assert_eq!(key.tag(Fel::ZERO).tag, key.poly(0).to_vec());
    }

    #[test]
    fn zero_key_gives_zero_tags() {
        let f = Arc::new(ExtField::new(3, 2).unwrap());
        let key = SourceKey::new(Matrix::zeros(&f, 3, 2));
        for s in f.elements().unwrap() {
            assert!(key.tag(s).tag.iter().all(|t| t.is_zero()));
        }
    }

    #[test]
    fn zero_packet_verifies() {
        let f = Arc::new(ExtField::new(3, 2).unwrap());
        let params = SystemParams::new(f.clone(), 3, 2, 2, vec![f.one(), f.from_base(2)], false).unwrap();
        let (_, vkeys) = keygen(&params, 5);
        let zero = TaggedPacket::zero(3);
        assert!(zero.is_zero());
        assert!(vkeys.iter().all(|v| v.verify(&zero)));
    }

    #[test]
    fn keygen_is_deterministic() {
        let f = Arc::new(ExtField::new(5, 2).unwrap());
        let params = SystemParams::new(f.clone(), 3, 2, 2, vec![f.one()], false).unwrap();
        assert_eq!(keygen(&params, 11).0, keygen(&params, 11).0);
        assert_ne!(keygen(&params, 11).0, keygen(&params, 12).0);
    }

    #[test]
    fn params_validation() {
        let f = Arc::new(ExtField::new(3, 1).unwrap());
        let one = f.one();
        assert!(SystemParams::new(f.clone(), 1, 1, 1, vec![one], false).is_err());
        assert!(SystemParams::new(f.clone(), 2, 0, 1, vec![one], false).is_err());
        assert!(SystemParams::new(f.clone(), 2, 1, 2, vec![one], false).is_err());
        assert!(SystemParams::new(f.clone(), 2, 1, 2, vec![one], true).is_ok());
        assert!(SystemParams::new(f.clone(), 2, 1, 1, vec![Fel::ZERO], false).is_err());
        assert!(SystemParams::new(f.clone(), 2, 1, 1, vec![one, one], false).is_err());
        assert!(SystemParams::new(f.clone(), 2, 1, 1, vec![], false).is_err());
    }

    #[test]
    fn combine_edge_cases() {
        let f = Arc::new(ExtField::new(3, 2).unwrap());
        let params = SystemParams::new(f.clone(), 2, 2, 2, vec![f.one()], false).unwrap();
        let (key, _) = keygen(&params, 1);
        let ps = vec![key.tag(f.from_base(1)), key.tag(f.from_vector(&[2, 1]).unwrap())];
        assert_eq!(combine(&f, &ps, &[0, 1]).unwrap(), ps[1]);
        assert!(combine(&f, &ps, &[0, 0]).unwrap().is_zero());
        assert!(matches!(combine(&f, &ps, &[1]), Err(Error::Shape(_))));
    }

    #[test]
    fn moore_rows() {
        let f = f2();
        let m = moore_matrix(&f, &[Fel::ZERO], 1);
        assert_eq!(m.to_raw_rows(), vec![vec![1, 0]]);
        let m2 = moore_matrix(&f, &[Fel::ZERO, f.one()], 1);
        assert_eq!(m2.to_raw_rows(), vec![vec![1, 0], vec![1, 1]]);
        assert_eq!(m2.rank(), 2);
    }

    #[test]
    fn tag_coefficients_match_tag() {
        let f = Arc::new(ExtField::new(2, 3).unwrap());
        let params = SystemParams::new(f.clone(), 4, 3, 1, vec![f.one()], false).unwrap();
        let (key, _) = keygen(&params, 3);
        let s = f.from_vector(&[1, 0, 1]).unwrap();
        let tag = key.tag(s).tag;
        for (j, &tj) in tag.iter().enumerate() {
            assert_eq!(key.tag_coefficient(j, s).unwrap(), tj);
        }
        assert_eq!(key.tag_coefficient(0, Fel::ZERO).unwrap(), key.poly(0)[0]);
        assert!(key.tag_coefficient(4, s).is_err());
    }

    #[test]
    fn parse_rejects_bad_lengths() {
        let f = ExtField::new(3, 2).unwrap();
        assert!(matches!(TaggedPacket::parse(&f, 2, &[1, 0, 0]), Err(Error::Shape(_))));
        assert!(matches!(TaggedPacket::parse(&f, 1, &[3, 0, 0, 0, 0]), Err(Error::Parameter(_))));
    }
}
