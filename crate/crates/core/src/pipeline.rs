//! End-to-end constructions: field → Zorn matrices → Paige loop → inner
//! orbits → scheme → intersection numbers → character table.

use alloc::sync::Arc;

use thiserror::Error;

use crate::chartab::{scheme_character_table, CharacterTable, ChartabError};
use crate::loopcore::{inner_orbits, loop_scheme, InnerOrbitPartition, LoopError, OrbitPolicy};
use crate::permgroup::linear::{psl2, LinearAction};
use crate::permgroup::{group_scheme, PermError, DEFAULT_RELATION_CAP};
use crate::scheme::{AssociationScheme, IntersectionNumbers, Provenance};
use crate::zorn::{PaigeLoop, ZornError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Zorn(#[from] ZornError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Chartab(#[from] ChartabError),
}

#[derive(Debug, Clone)]
pub struct PaigeScheme {
    pub lp: Arc<PaigeLoop>,
    pub classes: InnerOrbitPartition,
    pub scheme: AssociationScheme,
}

/// Scheme of M*(q) from randomized inner-mapping orbits.
pub fn paige_scheme(q: u32, seed: u64, cap: usize) -> Result<PaigeScheme, PipelineError> {
    let lp = Arc::new(PaigeLoop::build(q, cap)?);
    let classes = inner_orbits(&lp, OrbitPolicy::randomized(seed))?;
    let scheme = loop_scheme(lp.clone(), &classes)?.with_provenance(Provenance::Paige { q, seed });
    Ok(PaigeScheme { lp, classes, scheme })
}

/// Character table of the scheme of M*(q).
pub fn paige_character_table(
    q: u32,
    seed: u64,
    cap: usize,
) -> Result<(PaigeScheme, IntersectionNumbers, CharacterTable), PipelineError> {
    let ps = paige_scheme(q, seed, cap)?;
    let (b, t) = scheme_character_table(&ps.scheme, seed)?;
    Ok((ps, b, t))
}

/// Group scheme of PSL(2, q) and its character table.
pub fn psl2_character_table(
    q: u32,
    seed: u64,
) -> Result<(AssociationScheme, IntersectionNumbers, CharacterTable), PipelineError> {
    let g = psl2(q, LinearAction::ProjectiveLine)?;
    let s = group_scheme(&g, DEFAULT_RELATION_CAP)?;
    let (b, t) = scheme_character_table(&s, seed)?;
    Ok((s, b, t))
}
