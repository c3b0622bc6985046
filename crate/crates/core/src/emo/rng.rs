use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The engine's generator. Stream 0 drives a run; other streams are free for
/// callers that need independent draws from the same seed.
pub type EngineRng = ChaCha8Rng;

pub fn engine_rng(seed: u64) -> EngineRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn split_rng(seed: u64, stream: u64) -> EngineRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
