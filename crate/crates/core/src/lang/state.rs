//! Machine state layout, concrete states, and their JSON form.

use super::bits::Bitvec;
use super::value::{Pointer, RegId, RegionId, Value};
use rand::Rng;
use serde_json::{json, Map, Value as Json};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegInfo {
    pub name: String,
    pub width: u32,
    pub control: bool,
    pub dontgate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionInfo {
    pub name: String,
    pub cell: u32,
    pub len: u32,
    pub refw: u32,
    pub label: Option<String>,
}

impl RegionInfo {
    /// Bytes per cell; cells narrower than a byte occupy one byte each.
    pub fn stride(&self) -> u64 {
        self.cell.div_ceil(8).max(1) as u64
    }

    /// Cell index for a byte offset, if the offset is aligned and in range.
    pub fn cell_index(&self, offset: u64) -> Option<usize> {
        let stride = self.stride();
        if !offset.is_multiple_of(stride) {
            return None;
        }
        let i = offset / stride;
        (i < self.len as u64).then_some(i as usize)
    }

    pub fn offsets(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len as u64).map(move |i| i * self.stride())
    }
}

/// The registers and memory regions that make up a machine state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Shape {
    pub regs: Vec<RegInfo>,
    pub regions: Vec<RegionInfo>,
}

impl Shape {
    pub fn reg(&self, r: RegId) -> &RegInfo {
        &self.regs[r.0 as usize]
    }

    pub fn region(&self, r: RegionId) -> &RegionInfo {
        &self.regions[r.0 as usize]
    }

    pub fn reg_by_name(&self, name: &str) -> Option<RegId> {
        self.regs.iter().position(|r| r.name == name).map(|i| RegId(i as u32))
    }

    pub fn region_by_name(&self, name: &str) -> Option<RegionId> {
        self.regions.iter().position(|r| r.name == name).map(|i| RegionId(i as u32))
    }

    pub fn reg_ids(&self) -> impl Iterator<Item = RegId> {
        (0..self.regs.len() as u32).map(RegId)
    }

    pub fn region_ids(&self) -> impl Iterator<Item = RegionId> {
        (0..self.regions.len() as u32).map(RegionId)
    }

    pub fn base_pointer(&self, r: RegionId) -> Pointer {
        Pointer { region: r, offset: 0, width: self.region(r).refw }
    }

    pub fn zero_state(&self) -> MachineState {
        MachineState {
            regs: self.regs.iter().map(|r| Value::Bits(Bitvec::zero(r.width))).collect(),
            mem: self
                .regions
                .iter()
                .map(|m| vec![Value::Bits(Bitvec::zero(m.cell)); m.len as usize])
                .collect(),
        }
    }

    /// Uniformly random bits in every register and cell.
    pub fn random_state<R: Rng>(&self, rng: &mut R) -> MachineState {
        let mut bits = |w: u32| {
            let words: Vec<u32> = (0..w.div_ceil(32)).map(|_| rng.gen()).collect();
            Value::Bits(Bitvec::new(w, num_bigint::BigUint::from_slice(&words)))
        };
        MachineState {
            regs: self.regs.iter().map(|r| bits(r.width)).collect(),
            mem: self.regions.iter().map(|m| (0..m.len).map(|_| bits(m.cell)).collect()).collect(),
        }
    }

    pub fn show_value(&self, v: &Value) -> String {
        match v {
            Value::Ptr(p) => format!("[{}, {}]", self.region(p.region).name, p.offset),
            Value::Reg(r) => self.reg(*r).name.clone(),
            Value::RegSet(s, _) => {
                let names: Vec<&str> = s.iter().map(|r| self.reg(*r).name.as_str()).collect();
                format!("{{{}}}", names.join(", "))
            }
            v => v.to_string(),
        }
    }

    pub fn value_to_json(&self, v: &Value) -> Json {
        match v {
            Value::Ptr(p) => json!({"region": self.region(p.region).name, "offset": p.offset}),
            Value::Bits(b) => Json::String(b.literal()),
            v => Json::String(self.show_value(v)),
        }
    }

    pub fn value_from_json(&self, j: &Json, width: u32) -> Result<Value, StateError> {
        match j {
            Json::String(s) => {
                let b = Bitvec::parse_literal(s)
                    .ok_or_else(|| StateError(format!("bad bitvector literal {s:?}")))?;
                if b.width() != width {
                    return Err(StateError(format!("{s} has width {}, expected {width}", b.width())));
                }
                Ok(Value::Bits(b))
            }
            Json::Object(o) => {
                let name = o.get("region").and_then(Json::as_str).ok_or_else(|| {
                    StateError("pointer needs a \"region\" name".into())
                })?;
                let region = self
                    .region_by_name(name)
                    .ok_or_else(|| StateError(format!("unknown region {name}")))?;
                let offset = o.get("offset").and_then(Json::as_u64).unwrap_or(0);
                if self.region(region).refw != width {
                    return Err(StateError(format!("pointer into {name} does not fit width {width}")));
                }
                Ok(Value::Ptr(Pointer { region, offset, width }))
            }
            _ => Err(StateError(format!("unsupported value {j}"))),
        }
    }

    pub fn state_to_json(&self, s: &MachineState) -> Json {
        let mut regs = Map::new();
        for (info, v) in self.regs.iter().zip(&s.regs) {
            regs.insert(info.name.clone(), self.value_to_json(v));
        }
        let mut mem = Map::new();
        for (info, cells) in self.regions.iter().zip(&s.mem) {
            mem.insert(info.name.clone(), cells.iter().map(|v| self.value_to_json(v)).collect());
        }
        json!({"regs": regs, "mem": mem})
    }

    /// Reads a state; unspecified registers and cells default to zero.
    pub fn state_from_json(&self, j: &Json) -> Result<MachineState, StateError> {
        let mut st = self.zero_state();
        if let Some(regs) = j.get("regs").and_then(Json::as_object) {
            for (name, v) in regs {
                let r = self.reg_by_name(name).ok_or_else(|| StateError(format!("unknown register {name}")))?;
                st.regs[r.0 as usize] = self.value_from_json(v, self.reg(r).width)?;
            }
        }
        if let Some(mem) = j.get("mem").and_then(Json::as_object) {
            for (name, cells) in mem {
                let m = self.region_by_name(name).ok_or_else(|| StateError(format!("unknown region {name}")))?;
                let info = self.region(m);
                let set = |st: &mut MachineState, i: usize, v: &Json| -> Result<(), StateError> {
                    if i >= info.len as usize {
                        return Err(StateError(format!("cell {i} outside region {name}")));
                    }
                    st.mem[m.0 as usize][i] = self.value_from_json(v, info.cell)?;
                    Ok(())
                };
                match cells {
                    Json::Array(a) => {
                        for (i, v) in a.iter().enumerate() {
                            set(&mut st, i, v)?;
                        }
                    }
                    Json::Object(o) => {
                        for (k, v) in o {
                            let off: u64 = k.parse().map_err(|_| StateError(format!("bad offset {k}")))?;
                            let i = info
                                .cell_index(off)
                                .ok_or_else(|| StateError(format!("unaligned offset {off} in {name}")))?;
                            set(&mut st, i, v)?;
                        }
                    }
                    _ => return Err(StateError(format!("region {name} needs an array or object"))),
                }
            }
        }
        Ok(st)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateError(pub String);

impl fmt::Display for StateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for StateError {}

/// Register store and memory store. Registers are indexed by `RegId`, memory
/// by `RegionId` and then cell index.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineState {
    pub regs: Vec<Value>,
    pub mem: Vec<Vec<Value>>,
}

impl MachineState {
    pub fn reg(&self, r: RegId) -> &Value {
        &self.regs[r.0 as usize]
    }

    pub fn set_reg(&mut self, r: RegId, v: Value) {
        self.regs[r.0 as usize] = v;
    }

    pub fn cell(&self, region: RegionId, index: usize) -> &Value {
        &self.mem[region.0 as usize][index]
    }

    /// Checks that the state has exactly the layout `shape` describes.
    pub fn check_valid(&self, shape: &Shape) -> Result<(), StateError> {
        if self.regs.len() != shape.regs.len() {
            return Err(StateError(format!(
                "state has {} registers, machine declares {}",
                self.regs.len(),
                shape.regs.len()
            )));
        }
        for (info, v) in shape.regs.iter().zip(&self.regs) {
            if v.word_width() != Some(info.width) {
                return Err(StateError(format!("register {} holds {v}, expected {} bits", info.name, info.width)));
            }
        }
        if self.mem.len() != shape.regions.len() {
            return Err(StateError("memory regions do not match the machine".into()));
        }
        for (info, cells) in shape.regions.iter().zip(&self.mem) {
            if cells.len() != info.len as usize {
                return Err(StateError(format!("region {} has {} cells, expected {}", info.name, cells.len(), info.len)));
            }
            for (i, v) in cells.iter().enumerate() {
                if v.word_width() != Some(info.cell) {
                    return Err(StateError(format!(
                        "cell {} of {} holds {v}, expected {} bits",
                        i as u64 * info.stride(),
                        info.name,
                        info.cell
                    )));
                }
                if let Value::Ptr(p) = v {
                    if p.region.0 as usize >= shape.regions.len() {
                        return Err(StateError("pointer into an undeclared region".into()));
                    }
                }
            }
        }
        for v in &self.regs {
            if let Value::Ptr(p) = v {
                if p.region.0 as usize >= shape.regions.len() || shape.region(p.region).refw != p.width {
                    return Err(StateError("pointer into an undeclared region".into()));
                }
            }
        }
        Ok(())
    }
}
