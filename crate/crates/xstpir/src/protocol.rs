//! The retrieval runtime: secrecy-masked storage encoding, privacy-masked
//! query generation, the bilinear server answer, and linear-solve decoding.
//!
//! Storage noise is drawn once at encode time; privacy noise is drawn per
//! retrieval. Both come from a caller-supplied [`NoiseSource`] so every run
//! is replayable from a seed (and tests can force all-zero noise).
//!
//! Per server `n` the stored matrix is
//! `Y[k][ℓ] = s_k[ℓ] + Σ_a z_{k,ℓ}[a]·Gsec[ℓ][a][n]`, the query matrix is
//! `D[k][ℓ] = δ_{k,θ}·H[ℓ][n] + Σ_b t_{k,ℓ}[b]·Gpriv[b][n]`, and the answer
//! is the single symbol `Σ_{k,ℓ} Y[k][ℓ]·D[k][ℓ]`, so a retrieval downloads
//! exactly `N` symbols.

use crate::gf::{FieldElement, FieldParams};
use crate::scheme::SchemeSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("file index {theta} out of range for {files} files")]
    IndexOutOfRange { theta: usize, files: usize },
    #[error("server index mismatch: share {share}, query {query}")]
    ServerMismatch { share: usize, query: usize },
    #[error("answers are inconsistent with the scheme (corrupted or misbehaving server)")]
    InconsistentAnswers,
    #[error("bad answer set: {0}")]
    AnswerSetInvalid(String),
}

/// Source of noise symbols. Implementations must be deterministic for a
/// fixed construction so protocol runs replay exactly.
pub trait NoiseSource {
    fn draw(&mut self, field: &FieldParams) -> FieldElement;
}

/// Uniform noise from a seeded ChaCha stream.
pub struct SeededNoise(ChaCha12Rng);

impl SeededNoise {
    pub fn new(seed: u64) -> Self {
        SeededNoise(ChaCha12Rng::seed_from_u64(seed))
    }
}

impl NoiseSource for SeededNoise {
    fn draw(&mut self, field: &FieldParams) -> FieldElement {
        field
            .element(self.0.random_range(0..field.cardinality()))
            .expect("index sampled below the cardinality")
    }
}

/// All-zero noise; a test hook, not for real use.
pub struct ZeroNoise;

impl NoiseSource for ZeroNoise {
    fn draw(&mut self, _field: &FieldParams) -> FieldElement {
        FieldElement::ZERO
    }
}

/// `K` files of `L` symbols each, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Database {
    files: usize,
    file_len: usize,
    symbols: Vec<FieldElement>,
}

impl Database {
    pub fn new(
        files: usize,
        file_len: usize,
        symbols: Vec<FieldElement>,
    ) -> Result<Database, ProtocolError> {
        if symbols.len() != files * file_len {
            return Err(ProtocolError::DimensionMismatch(format!(
                "{} symbols for a {}x{} database",
                symbols.len(),
                files,
                file_len
            )));
        }
        Ok(Database {
            files,
            file_len,
            symbols,
        })
    }

    pub fn zero(files: usize, file_len: usize) -> Database {
        Database {
            files,
            file_len,
            symbols: vec![FieldElement::ZERO; files * file_len],
        }
    }

    pub fn random(
        files: usize,
        file_len: usize,
        field: &FieldParams,
        noise: &mut dyn NoiseSource,
    ) -> Database {
        Database {
            files,
            file_len,
            symbols: (0..files * file_len).map(|_| noise.draw(field)).collect(),
        }
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn file_len(&self) -> usize {
        self.file_len
    }

    pub fn get(&self, k: usize, l: usize) -> FieldElement {
        self.symbols[k * self.file_len + l]
    }

    pub fn file(&self, k: usize) -> &[FieldElement] {
        &self.symbols[k * self.file_len..(k + 1) * self.file_len]
    }
}

/// One server's stored `K × L` symbol matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StorageShare {
    pub server_index: usize,
    files: usize,
    file_len: usize,
    y: Vec<FieldElement>,
}

impl StorageShare {
    pub fn new(
        server_index: usize,
        files: usize,
        file_len: usize,
        y: Vec<FieldElement>,
    ) -> Result<StorageShare, ProtocolError> {
        if y.len() != files * file_len {
            return Err(ProtocolError::DimensionMismatch(format!(
                "{} symbols for a {}x{} share",
                y.len(),
                files,
                file_len
            )));
        }
        Ok(StorageShare {
            server_index,
            files,
            file_len,
            y,
        })
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn file_len(&self) -> usize {
        self.file_len
    }

    pub fn get(&self, k: usize, l: usize) -> FieldElement {
        self.y[k * self.file_len + l]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.y
    }
}

/// One server's `K × L` query matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub server_index: usize,
    files: usize,
    file_len: usize,
    d: Vec<FieldElement>,
}

impl Query {
    pub fn new(
        server_index: usize,
        files: usize,
        file_len: usize,
        d: Vec<FieldElement>,
    ) -> Result<Query, ProtocolError> {
        if d.len() != files * file_len {
            return Err(ProtocolError::DimensionMismatch(format!(
                "{} symbols for a {}x{} query",
                d.len(),
                files,
                file_len
            )));
        }
        Ok(Query {
            server_index,
            files,
            file_len,
            d,
        })
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn file_len(&self) -> usize {
        self.file_len
    }

    pub fn get(&self, k: usize, l: usize) -> FieldElement {
        self.d[k * self.file_len + l]
    }

    pub fn data(&self) -> &[FieldElement] {
        &self.d
    }
}

/// A single answer symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Answer {
    pub server_index: usize,
    pub value: FieldElement,
}

/// Storage shares from explicit secrecy noise: `z_noise[k·L+ℓ]` is the
/// length-`dim_sec` vector masking symbol `(k, ℓ)`.
pub fn storage_from_noise(
    scheme: &SchemeSpec,
    db: &Database,
    z_noise: &[Vec<FieldElement>],
) -> Result<Vec<StorageShare>, ProtocolError> {
    if db.file_len() != scheme.file_len() {
        return Err(ProtocolError::DimensionMismatch(format!(
            "database file length {} differs from scheme file length {}",
            db.file_len(),
            scheme.file_len()
        )));
    }
    let l = scheme.file_len();
    let k_files = db.files();
    if z_noise.len() != k_files * l || z_noise.iter().any(|v| v.len() != scheme.dim_sec()) {
        return Err(ProtocolError::DimensionMismatch(
            "secrecy noise tensor has wrong shape".to_string(),
        ));
    }
    let field = scheme.field();
    let n = scheme.n_servers();
    let mut shares = Vec::with_capacity(n);
    for server in 0..n {
        let mut y = Vec::with_capacity(k_files * l);
        for k in 0..k_files {
            for sym in 0..l {
                let mut v = db.get(k, sym);
                let g = &scheme.g_sec()[sym];
                for (a, &z) in z_noise[k * l + sym].iter().enumerate() {
                    v = field.add(v, field.mul(z, g.get(a, server)));
                }
                y.push(v);
            }
        }
        shares.push(StorageShare::new(server, k_files, l, y)?);
    }
    Ok(shares)
}

/// X-secure storage encoding; draws one noise vector per `(file, symbol)`
/// pair, file-major, and is deterministic given the noise source.
pub fn encode_storage(
    scheme: &SchemeSpec,
    db: &Database,
    noise: &mut dyn NoiseSource,
) -> Result<Vec<StorageShare>, ProtocolError> {
    let field = scheme.field();
    let z: Vec<Vec<FieldElement>> = (0..db.files() * scheme.file_len())
        .map(|_| (0..scheme.dim_sec()).map(|_| noise.draw(field)).collect())
        .collect();
    storage_from_noise(scheme, db, &z)
}

/// Queries from explicit privacy noise, laid out like `storage_from_noise`.
pub fn queries_from_noise(
    scheme: &SchemeSpec,
    theta: usize,
    files: usize,
    t_noise: &[Vec<FieldElement>],
) -> Result<Vec<Query>, ProtocolError> {
    if theta >= files {
        return Err(ProtocolError::IndexOutOfRange { theta, files });
    }
    let l = scheme.file_len();
    if t_noise.len() != files * l || t_noise.iter().any(|v| v.len() != scheme.dim_priv()) {
        return Err(ProtocolError::DimensionMismatch(
            "privacy noise tensor has wrong shape".to_string(),
        ));
    }
    let field = scheme.field();
    let n = scheme.n_servers();
    let mut queries = Vec::with_capacity(n);
    for server in 0..n {
        let mut d = Vec::with_capacity(files * l);
        for k in 0..files {
            for sym in 0..l {
                let mut v = if k == theta {
                    scheme.h().get(sym, server)
                } else {
                    FieldElement::ZERO
                };
                for (b, &t) in t_noise[k * l + sym].iter().enumerate() {
                    v = field.add(v, field.mul(t, scheme.g_priv().get(b, server)));
                }
                d.push(v);
            }
        }
        queries.push(Query::new(server, files, l, d)?);
    }
    Ok(queries)
}

/// T-private query generation for file `theta` (0-based); fresh noise per
/// retrieval, deterministic given the noise source.
pub fn gen_queries(
    scheme: &SchemeSpec,
    theta: usize,
    files: usize,
    noise: &mut dyn NoiseSource,
) -> Result<Vec<Query>, ProtocolError> {
    if theta >= files {
        return Err(ProtocolError::IndexOutOfRange { theta, files });
    }
    let field = scheme.field();
    let t: Vec<Vec<FieldElement>> = (0..files * scheme.file_len())
        .map(|_| (0..scheme.dim_priv()).map(|_| noise.draw(field)).collect())
        .collect();
    queries_from_noise(scheme, theta, files, &t)
}

/// The bilinear answer `Σ_{k,ℓ} Y[k][ℓ]·D[k][ℓ]`.
pub fn server_answer(
    share: &StorageShare,
    query: &Query,
    field: &FieldParams,
) -> Result<Answer, ProtocolError> {
    if share.server_index != query.server_index {
        return Err(ProtocolError::ServerMismatch {
            share: share.server_index,
            query: query.server_index,
        });
    }
    if share.files != query.files || share.file_len != query.file_len {
        return Err(ProtocolError::DimensionMismatch(format!(
            "share {}x{} vs query {}x{}",
            share.files, share.file_len, query.files, query.file_len
        )));
    }
    let mut value = FieldElement::ZERO;
    for (&y, &d) in share.y.iter().zip(query.d.iter()) {
        value = field.add(value, field.mul(y, d));
    }
    Ok(Answer {
        server_index: share.server_index,
        value,
    })
}

/// Solves `c · [H; W] = (A_1..A_N)` and returns the first `L` coordinates of
/// the unique solution — the requested file. An answer vector outside the
/// row space signals corruption and yields [`ProtocolError::InconsistentAnswers`].
pub fn decode(scheme: &SchemeSpec, answers: &[Answer]) -> Result<Vec<FieldElement>, ProtocolError> {
    let n = scheme.n_servers();
    if answers.len() != n {
        return Err(ProtocolError::AnswerSetInvalid(format!(
            "expected {} answers, got {}",
            n,
            answers.len()
        )));
    }
    for (i, a) in answers.iter().enumerate() {
        if a.server_index != i {
            return Err(ProtocolError::AnswerSetInvalid(format!(
                "answer {} carries server index {}",
                i, a.server_index
            )));
        }
    }
    let stacked = scheme.h().vstack(scheme.w());
    let rhs: Vec<FieldElement> = answers.iter().map(|a| a.value).collect();
    let coeffs = crate::linalg::solve_left(&stacked, &rhs, scheme.field())
        .ok_or(ProtocolError::InconsistentAnswers)?;
    Ok(coeffs[..scheme.file_len()].to_vec())
}

/// End-to-end in-process pipeline: encode, query, answer, decode.
pub fn run_pipeline(
    scheme: &SchemeSpec,
    db: &Database,
    theta: usize,
    storage_seed: u64,
    query_seed: u64,
) -> Result<Vec<FieldElement>, ProtocolError> {
    let mut storage_noise = SeededNoise::new(storage_seed);
    let shares = encode_storage(scheme, db, &mut storage_noise)?;
    let mut query_noise = SeededNoise::new(query_seed);
    let queries = gen_queries(scheme, theta, db.files(), &mut query_noise)?;
    let answers: Vec<Answer> = shares
        .iter()
        .zip(queries.iter())
        .map(|(s, q)| server_answer(s, q, scheme.field()))
        .collect::<Result<_, _>>()?;
    decode(scheme, &answers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::{build_hermitian, build_rational};

    #[test]
    fn zero_database_zero_noise_gives_zero_shares() {
        let s = build_rational(11, 2, 1, 1).unwrap();
        let db = Database::zero(3, 2);
        let shares = encode_storage(&s, &db, &mut ZeroNoise).unwrap();
        assert_eq!(shares.len(), 6);
        for share in &shares {
            assert!(share.data().iter().all(|e| e.is_zero()));
        }
    }

    #[test]
    fn empty_database_gives_empty_shares() {
        let s = build_rational(11, 2, 1, 1).unwrap();
        let db = Database::zero(0, 2);
        let shares = encode_storage(&s, &db, &mut SeededNoise::new(1)).unwrap();
        assert!(shares.iter().all(|sh| sh.data().is_empty()));
    }

    #[test]
    fn zero_noise_queries_are_carrier_rows() {
        let s = build_rational(11, 2, 1, 1).unwrap();
        let queries = gen_queries(&s, 0, 2, &mut ZeroNoise).unwrap();
        for (n, q) in queries.iter().enumerate() {
            for l in 0..2 {
                assert_eq!(q.get(0, l), s.h().get(l, n));
                assert!(q.get(1, l).is_zero());
            }
        }
    }

    #[test]
    fn single_server_secrecy_generators_are_nonzero() {
        // X = 1 one-time-pad witness: every Gsec[l][0][n] is nonzero because
        // f_1 and f_1/x have no admissible zeros
        let s = build_rational(11, 2, 1, 1).unwrap();
        for g in s.g_sec() {
            for n in 0..s.n_servers() {
                assert!(!g.get(0, n).is_zero());
            }
        }
    }

    #[test]
    fn theta_out_of_range() {
        let s = build_rational(11, 2, 1, 1).unwrap();
        assert_eq!(
            gen_queries(&s, 3, 3, &mut ZeroNoise).unwrap_err(),
            ProtocolError::IndexOutOfRange { theta: 3, files: 3 }
        );
    }

    #[test]
    fn trivial_answer_identities() {
        let s = build_rational(11, 2, 1, 1).unwrap();
        let field = s.field();
        let zero_share = StorageShare::new(0, 1, 2, vec![FieldElement::ZERO; 2]).unwrap();
        let q = Query::new(0, 1, 2, vec![field.embed(5), field.embed(7)]).unwrap();
        assert!(server_answer(&zero_share, &q, field)
            .unwrap()
            .value
            .is_zero());

        let y = StorageShare::new(0, 1, 1, vec![field.embed(4)]).unwrap();
        let d = Query::new(0, 1, 1, vec![field.embed(6)]).unwrap();
        assert_eq!(server_answer(&y, &d, field).unwrap().value, field.embed(2));
        // 24 mod 11
    }

    #[test]
    fn end_to_end_exact_recovery() {
        let s = build_rational(13, 4, 2, 1).unwrap();
        let mut dbnoise = SeededNoise::new(99);
        let db = Database::random(3, 4, s.field(), &mut dbnoise);
        for theta in 0..3 {
            let got = run_pipeline(&s, &db, theta, 7, 11).unwrap();
            assert_eq!(got, db.file(theta));
        }
    }

    #[test]
    fn end_to_end_hermitian() {
        let s = build_hermitian(5, 4, 1, 1).unwrap();
        let mut dbnoise = SeededNoise::new(5);
        let db = Database::random(2, 10, s.field(), &mut dbnoise);
        let got = run_pipeline(&s, &db, 1, 21, 22).unwrap();
        assert_eq!(got, db.file(1));
    }

    #[test]
    fn zero_database_decodes_to_zero_despite_noise() {
        let s = build_rational(11, 2, 1, 1).unwrap();
        let db = Database::zero(3, 2);
        let got = run_pipeline(&s, &db, 2, 1234, 5678).unwrap();
        assert!(got.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn decoding_is_linear_in_the_database() {
        let s = build_rational(11, 4, 1, 1).unwrap();
        let field = s.field();
        let mut n1 = SeededNoise::new(301);
        let mut n2 = SeededNoise::new(302);
        let db1 = Database::random(2, 4, field, &mut n1);
        let db2 = Database::random(2, 4, field, &mut n2);
        let sum = Database::new(
            2,
            4,
            db1.symbols
                .iter()
                .zip(db2.symbols.iter())
                .map(|(&a, &b)| field.add(a, b))
                .collect(),
        )
        .unwrap();
        let d1 = run_pipeline(&s, &db1, 1, 41, 42).unwrap();
        let d2 = run_pipeline(&s, &db2, 1, 41, 42).unwrap();
        let ds = run_pipeline(&s, &sum, 1, 41, 42).unwrap();
        // identical seeds: decode(db1 + db2) = decode(db1) + decode(db2)
        // holds for the file part because noise coefficients double but the
        // info coordinates are the file symbols themselves
        for i in 0..4 {
            assert_eq!(ds[i], field.add(d1[i], d2[i]));
        }
    }

    #[test]
    fn answer_vector_lies_in_stacked_row_space() {
        let s = build_rational(13, 2, 2, 2).unwrap();
        let mut dbnoise = SeededNoise::new(8);
        let db = Database::random(2, 2, s.field(), &mut dbnoise);
        let shares = encode_storage(&s, &db, &mut SeededNoise::new(9)).unwrap();
        let queries = gen_queries(&s, 0, 2, &mut SeededNoise::new(10)).unwrap();
        let answers: Vec<FieldElement> = shares
            .iter()
            .zip(queries.iter())
            .map(|(sh, q)| server_answer(sh, q, s.field()).unwrap().value)
            .collect();
        let stacked = s.h().vstack(s.w());
        let mut with_answer = stacked.clone();
        with_answer = with_answer.vstack(&crate::linalg::Matrix::from_rows(vec![answers]));
        assert_eq!(with_answer.rank(s.field()), stacked.rank(s.field()));
    }

    #[test]
    fn single_server_query_marginal_is_uniform() {
        // q=7, L=2, X=1, T=1, K=2: over all 7^4 privacy-noise tuples, each
        // server's K×L query view takes every value in F_7^4 exactly once,
        // for either requested index
        let s = build_rational(7, 2, 1, 1).unwrap();
        let field = s.field();
        let card = field.cardinality();
        for theta in 0..2usize {
            for server in 0..s.n_servers() {
                let mut seen = std::collections::HashSet::new();
                for tuple in 0..card.pow(4) {
                    let mut digits = tuple;
                    let noise: Vec<Vec<FieldElement>> = (0..4)
                        .map(|_| {
                            let d = digits % card;
                            digits /= card;
                            vec![field.element(d).unwrap()]
                        })
                        .collect();
                    let queries = queries_from_noise(&s, theta, 2, &noise).unwrap();
                    let view: Vec<u64> = queries[server].data().iter().map(|e| e.index()).collect();
                    assert!(seen.insert(view), "repeated view");
                }
                assert_eq!(seen.len() as u64, card.pow(4));
            }
        }
    }

    #[test]
    fn corruption_detection_matches_row_space_geometry() {
        // A corrupted answer A + δ·e_n stays consistent exactly when e_n lies
        // in the row space of [H; W]. For this scheme the stacked matrix has
        // rank 5 in F_11^6 and exactly one unit vector (server 1, x = 2)
        // falls inside, so that server's corruptions decode silently to a
        // wrong file while every other corruption is detected.
        let s = build_rational(11, 2, 1, 1).unwrap();
        let field = s.field();
        let stacked = s.h().vstack(s.w());
        let blind: Vec<usize> = (0..s.n_servers())
            .filter(|&n| {
                let mut e = vec![FieldElement::ZERO; s.n_servers()];
                e[n] = FieldElement::ONE;
                let ext = stacked.vstack(&crate::linalg::Matrix::from_rows(vec![e]));
                ext.rank(field) == stacked.rank(field)
            })
            .collect();
        assert_eq!(blind, vec![1]);
        assert_eq!(s.points()[1].x, field.embed(2));

        let mut dbnoise = SeededNoise::new(404);
        let db = Database::random(3, 2, field, &mut dbnoise);
        let shares = encode_storage(&s, &db, &mut SeededNoise::new(405)).unwrap();
        let queries = gen_queries(&s, 1, 3, &mut SeededNoise::new(406)).unwrap();
        let answers: Vec<Answer> = shares
            .iter()
            .zip(queries.iter())
            .map(|(sh, q)| server_answer(sh, q, field).unwrap())
            .collect();

        let mut corrupt_noise = SeededNoise::new(407);
        let mut detected = 0u32;
        for trial in 0..1000 {
            let n = trial % s.n_servers();
            let mut delta = corrupt_noise.draw(field);
            while delta.is_zero() {
                delta = corrupt_noise.draw(field);
            }
            let mut corrupted = answers.clone();
            corrupted[n].value = field.add(corrupted[n].value, delta);
            match decode(&s, &corrupted) {
                Err(ProtocolError::InconsistentAnswers) => {
                    assert!(!blind.contains(&n));
                    detected += 1;
                }
                Err(other) => panic!("unexpected error {other:?}"),
                Ok(file) => {
                    assert!(blind.contains(&n), "silent corruption at server {n}");
                    assert_ne!(file, db.file(1), "corruption must not decode correctly");
                }
            }
        }
        // positions cycle through the 6 servers; the blind one gets 167 of
        // the 1000 trials and never detects, every other trial does
        assert_eq!(detected, 833);
    }

    #[test]
    fn rate_accounting() {
        let s = build_rational(17, 12, 1, 1).unwrap();
        let db = Database::zero(2, 12);
        let shares = encode_storage(&s, &db, &mut SeededNoise::new(0)).unwrap();
        // one symbol per server per retrieval
        assert_eq!(shares.len(), s.n_servers());
        assert_eq!(
            s.rate(),
            num_rational::Ratio::new(12, s.n_servers() as i128)
        );
    }
}
