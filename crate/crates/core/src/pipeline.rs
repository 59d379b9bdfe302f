//! The full mapping run: first-pass trace, map, optional second pass.

use log::info;

use crate::error::Result;
use crate::geometry::{BitextMap, BitextSpace, Chain, TokenizedText};
use crate::mapping::{build_map, second_pass};
use crate::matching::{MatchConfig, PointGenerator};
use crate::params::SimrParams;
use crate::search::trace_first_pass;

#[derive(Debug, Clone)]
pub struct SimrOutput {
    pub space: BitextSpace,
    pub first_pass: Vec<Chain>,
    /// Chains added by the second pass.
    pub second_pass: Vec<Chain>,
    pub first_map: BitextMap,
    pub map: BitextMap,
    pub first_generated: usize,
    pub second_generated: usize,
}

impl SimrOutput {
    pub fn chains(&self) -> impl Iterator<Item = &Chain> {
        self.first_pass.iter().chain(&self.second_pass)
    }

    pub fn chain_count(&self) -> usize {
        self.first_pass.len() + self.second_pass.len()
    }
}

pub fn run_simr(
    x: &TokenizedText,
    y: &TokenizedText,
    cfg: &MatchConfig,
    params: &SimrParams,
    with_second_pass: bool,
) -> Result<SimrOutput> {
    params.validate()?;
    cfg.validate()?;
    let space = BitextSpace::for_texts(x, y)?;
    let gen = PointGenerator::new(x, y, cfg);
    let first_pass = trace_first_pass(&gen, params, &space);
    let first_generated = gen.generated();
    let first_map = build_map(&first_pass, &space)?;
    info!(
        "first pass: {} chains, {} points generated",
        first_pass.len(),
        first_generated
    );
    let (second, map, second_generated) = if with_second_pass {
        let sp = second_pass(&first_pass, &gen, params, &space)?;
        info!("second pass: {} chains over {} regions", sp.chains.len(), sp.regions);
        (sp.chains, sp.map, sp.generated)
    } else {
        (Vec::new(), first_map.clone(), 0)
    };
    Ok(SimrOutput {
        space,
        first_pass,
        second_pass: second,
        first_map,
        map,
        first_generated,
        second_generated,
    })
}
