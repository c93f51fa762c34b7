#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ncauth::auth::{keygen, random_points, SourceKey, SystemParams, VerifierKey};
use ncauth::{ExtField, Fel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn field(q: u32, l: usize) -> Arc<ExtField> {
    Arc::new(ExtField::new(q, l).unwrap())
}

/// Fields small enough for exhaustive checks.
pub const SMALL_FIELDS: [(u32, usize); 8] = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 2)];

pub struct Instance {
    pub field: Arc<ExtField>,
    pub params: SystemParams,
    pub key: SourceKey,
    pub vkeys: Vec<VerifierKey>,
    pub messages: Vec<Fel>,
}

/// A random deployment with `verifiers` points (capped by the field size).
pub fn instance(q: u32, l: usize, k: usize, m: usize, n: usize, verifiers: usize, seed: u64) -> Instance {
    let f = field(q, l);
    let mut r = rng(seed);
    let v = verifiers.min(f.order() as usize - 1);
    let points = random_points(&f, v, &mut r).unwrap();
    let params = SystemParams::new(f.clone(), k, m, n, points, n > m).unwrap();
    let (key, vkeys) = keygen(&params, r.gen());
    let messages = (0..n).map(|_| f.random(&mut r)).collect();
    Instance { field: f, params, key, vkeys, messages }
}
