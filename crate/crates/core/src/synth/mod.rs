// SPDX-License-Identifier: Apache-2.0

//! Logic synthesis: behavioral AST to a clocked netlist over {NOR2, NOT, BUF, DLATCH, CONST}.

pub mod aig;
pub mod elaborate;
pub mod equiv;
pub mod fanout;
pub mod interp;
pub mod json;
pub mod mapping;
pub mod netlist;

pub use elaborate::{elaborate, BitRef, FunctionTable, StateBit};
pub use equiv::{check_equivalence, MAX_EQUIV_BITS};
pub use fanout::{clock_skew, insert_io_buffers, limit_fanout, MAX_CONTENDING};
pub use interp::{Interpreter, Values};
pub use json::{
    import_netlist_json, import_netlist_json_with, netlist_to_json, netlist_to_yosys_json, CellMap, CellSpec,
};
pub use mapping::map_to_basis;
pub use netlist::{Gate, GateCounts, GateKind, GateNetlist, NetId, NetOrigin, LATCH_C, LATCH_D};

use crate::mdl::BehaviorAst;

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("behavior module has no clocked process")]
    NoProcess,
    #[error("register `{0}` mixes blocking and nonblocking assignments")]
    MixedAssignment(String),
    #[error("unsupported construct: {0}")]
    Unsupported(String),
    #[error("width mismatch: {0}")]
    Width(String),
    #[error("combinational loop in netlist")]
    CombinationalLoop,
    #[error("malformed netlist: {0}")]
    Malformed(String),
    #[error("instance too large: {bits} free bits exceed the limit of {limit}")]
    TooLarge { bits: usize, limit: usize },
    #[error("netlist JSON: {0}")]
    Schema(String),
    #[error("unsupported cell `{0}`")]
    UnsupportedCell(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    pub max_fanout: usize,
    /// Isolate every sensor and actuator bit behind its own BUF.
    pub io_buffers: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            max_fanout: 2,
            io_buffers: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    pub table: FunctionTable,
    /// Netlist straight out of the mapper.
    pub mapped: GateNetlist,
    /// Buffered netlist meeting the fanout rules.
    pub netlist: GateNetlist,
}

pub fn synthesize(ast: &BehaviorAst, options: &SynthOptions) -> Result<Synthesis, SynthError> {
    let table = elaborate(ast)?;
    let mapped = map_to_basis(&table);
    mapped.check()?;
    let buffered = if options.io_buffers {
        insert_io_buffers(&mapped)
    } else {
        mapped.clone()
    };
    let netlist = limit_fanout(&buffered, options.max_fanout);
    netlist.check()?;
    Ok(Synthesis { table, mapped, netlist })
}
