//! Choi operators with named wires, composed by link product.
//!
//! A [`Process`] is a linear map from its input wires to its output wires,
//! stored as an unnormalized Choi operator whose tensor factors follow the
//! order of `wires`. Linking two processes contracts every wire name that is
//! an output of one and an input of the other; all remaining wires stay open.

use crate::error::{Error, Result};
use crate::linalg::{omega, partial_trace, permute_factors, CMatrix, C64, ZERO};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dir {
    In,
    Out,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    pub name: String,
    pub dim: usize,
    pub dir: Dir,
}

impl Wire {
    pub fn input(name: impl Into<String>, dim: usize) -> Self {
        Wire {
            name: name.into(),
            dim,
            dir: Dir::In,
        }
    }

    pub fn output(name: impl Into<String>, dim: usize) -> Self {
        Wire {
            name: name.into(),
            dim,
            dir: Dir::Out,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Process {
    wires: Vec<Wire>,
    choi: CMatrix,
}

impl Process {
    pub fn new(wires: Vec<Wire>, choi: CMatrix) -> Result<Self> {
        let total: usize = wires.iter().map(|w| w.dim).product();
        if !choi.is_square() || choi.rows() != total {
            return Err(Error::DimensionMismatch(format!(
                "wires of total dim {} vs {}x{} Choi",
                total,
                choi.rows(),
                choi.cols()
            )));
        }
        for (i, w) in wires.iter().enumerate() {
            if wires[..i].iter().any(|v| v.name == w.name) {
                return Err(Error::Wire(format!("duplicate wire '{}'", w.name)));
            }
        }
        Ok(Process { wires, choi })
    }

    /// Process defined by Kraus operators mapping `inputs` (in order, tensored)
    /// to `outputs`. The Choi operator has factor order `outputs ++ inputs`.
    pub fn from_kraus(outputs: &[(&str, usize)], inputs: &[(&str, usize)], kraus: &[CMatrix]) -> Result<Self> {
        let dout: usize = outputs.iter().map(|w| w.1).product();
        let din: usize = inputs.iter().map(|w| w.1).product();
        let n = dout * din;
        let mut choi = CMatrix::zeros(n, n);
        for k in kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator {}x{} for a {} -> {} map",
                    k.rows(),
                    k.cols(),
                    din,
                    dout
                )));
            }
            // (K ⊗ I)|Ω⟩ is the row-major flattening of K
            let v = k.as_slice();
            for (i, &vi) in v.iter().enumerate() {
                if vi == ZERO {
                    continue;
                }
                for (j, &vj) in v.iter().enumerate() {
                    choi[(i, j)] += vi * vj.conj();
                }
            }
        }
        let wires = outputs
            .iter()
            .map(|&(n, d)| Wire::output(n, d))
            .chain(inputs.iter().map(|&(n, d)| Wire::input(n, d)))
            .collect();
        Process::new(wires, choi)
    }

    /// Identity map from wire `input` to wire `output`.
    pub fn identity(input: &str, output: &str, dim: usize) -> Self {
        let om = omega(dim);
        Process {
            wires: vec![Wire::output(output, dim), Wire::input(input, dim)],
            choi: om.projector(),
        }
    }

    /// A state preparation: a process with only output wires.
    pub fn state(outputs: &[(&str, usize)], rho: CMatrix) -> Result<Self> {
        Process::new(outputs.iter().map(|&(n, d)| Wire::output(n, d)).collect(), rho)
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn into_choi(self) -> CMatrix {
        self.choi
    }

    pub fn dims(&self) -> Vec<usize> {
        self.wires.iter().map(|w| w.dim).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.wires.iter().position(|w| w.name == name)
    }

    pub fn wire(&self, name: &str) -> Option<&Wire> {
        self.wires.iter().find(|w| w.name == name)
    }

    pub fn input_dim(&self) -> usize {
        self.wires.iter().filter(|w| w.dir == Dir::In).map(|w| w.dim).product()
    }

    pub fn output_dim(&self) -> usize {
        self.wires.iter().filter(|w| w.dir == Dir::Out).map(|w| w.dim).product()
    }

    pub fn rename(mut self, old: &str, new: &str) -> Result<Self> {
        if old != new && self.position(new).is_some() {
            return Err(Error::Wire(format!("wire '{}' already exists", new)));
        }
        let i = self
            .position(old)
            .ok_or_else(|| Error::Wire(format!("no wire '{}'", old)))?;
        self.wires[i].name = new.to_string();
        Ok(self)
    }

    /// Prefixes every wire name.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        for w in &mut self.wires {
            w.name = format!("{}{}", prefix, w.name);
        }
        self
    }

    /// Reorders the wires; `names` must list every wire exactly once.
    pub fn reorder(&self, names: &[&str]) -> Result<Self> {
        if names.len() != self.wires.len() {
            return Err(Error::Wire(format!(
                "reorder lists {} wires, process has {}",
                names.len(),
                self.wires.len()
            )));
        }
        let perm: Vec<usize> = names
            .iter()
            .map(|n| {
                self.position(n)
                    .ok_or_else(|| Error::Wire(format!("no wire '{}'", n)))
            })
            .collect::<Result<_>>()?;
        let choi = permute_factors(&self.choi, &self.dims(), &perm)?;
        let wires = perm.iter().map(|&p| self.wires[p].clone()).collect();
        Process::new(wires, choi)
    }

    /// Fuses the listed wires (which must share a direction) into one wire
    /// whose factor is their tensor product in the listed order. The fused
    /// wire takes the position of the first listed wire.
    pub fn merge(&self, names: &[&str], new_name: &str) -> Result<Self> {
        let first = names
            .first()
            .ok_or_else(|| Error::Wire("merge of no wires".into()))?;
        let dir = self
            .wire(first)
            .ok_or_else(|| Error::Wire(format!("no wire '{}'", first)))?
            .dir;
        let mut order: Vec<&str> = Vec::new();
        let pos0 = self.position(first).unwrap();
        for (i, w) in self.wires.iter().enumerate() {
            if i == pos0 {
                order.extend_from_slice(names);
            } else if !names.contains(&w.name.as_str()) {
                order.push(&w.name);
            }
        }
        let p = self.reorder(&order)?;
        let mut dim = 1;
        for n in names {
            let w = p.wire(n).unwrap();
            if w.dir != dir {
                return Err(Error::Wire(format!("cannot merge wires of mixed direction ({})", n)));
            }
            dim *= w.dim;
        }
        let mut wires = Vec::new();
        for w in &p.wires {
            if w.name == *first {
                wires.push(Wire {
                    name: new_name.to_string(),
                    dim,
                    dir,
                });
            } else if !names.contains(&w.name.as_str()) {
                wires.push(w.clone());
            }
        }
        Process::new(wires, p.choi)
    }

    /// Splits one wire into several consecutive factors.
    pub fn split(&self, name: &str, parts: &[(&str, usize)]) -> Result<Self> {
        let i = self
            .position(name)
            .ok_or_else(|| Error::Wire(format!("no wire '{}'", name)))?;
        let total: usize = parts.iter().map(|p| p.1).product();
        if total != self.wires[i].dim {
            return Err(Error::DimensionMismatch(format!(
                "split of '{}' (dim {}) into parts of product {}",
                name, self.wires[i].dim, total
            )));
        }
        let dir = self.wires[i].dir;
        let mut wires = self.wires[..i].to_vec();
        wires.extend(parts.iter().map(|&(n, d)| Wire {
            name: n.to_string(),
            dim: d,
            dir,
        }));
        wires.extend_from_slice(&self.wires[i + 1..]);
        Process::new(wires, self.choi.clone())
    }

    /// Discards the named output wires (partial trace).
    pub fn trace_out(&self, names: &[&str]) -> Result<Self> {
        for n in names {
            match self.wire(n) {
                Some(w) if w.dir == Dir::Out => {}
                Some(_) => return Err(Error::Wire(format!("'{}' is an input; only outputs can be discarded", n))),
                None => return Err(Error::Wire(format!("no wire '{}'", n))),
            }
        }
        let keep: Vec<usize> = (0..self.wires.len())
            .filter(|&i| !names.contains(&self.wires[i].name.as_str()))
            .collect();
        let choi = partial_trace(&self.choi, &self.dims(), &keep)?;
        let wires = keep.iter().map(|&i| self.wires[i].clone()).collect();
        Process::new(wires, choi)
    }

    /// Link product: contracts all wires shared (by name) between `self` and
    /// `other`. Each shared wire must be an output of one and an input of the
    /// other with matching dimensions. Result wires are `self`'s open wires
    /// followed by `other`'s.
    pub fn link(&self, other: &Process) -> Result<Process> {
        let mut shared: Vec<&str> = Vec::new();
        for w in &self.wires {
            if let Some(v) = other.wire(&w.name) {
                if v.dim != w.dim {
                    return Err(Error::DimensionMismatch(format!(
                        "wire '{}' has dim {} vs {}",
                        w.name, w.dim, v.dim
                    )));
                }
                if v.dir == w.dir {
                    return Err(Error::Wire(format!(
                        "wire '{}' has the same direction on both sides",
                        w.name
                    )));
                }
                shared.push(&w.name);
            }
        }
        let rest1: Vec<&str> = self
            .wires
            .iter()
            .map(|w| w.name.as_str())
            .filter(|n| !shared.contains(n))
            .collect();
        let rest2: Vec<&str> = other
            .wires
            .iter()
            .map(|w| w.name.as_str())
            .filter(|n| !shared.contains(n))
            .collect();

        let order1: Vec<&str> = rest1.iter().chain(&shared).copied().collect();
        let order2: Vec<&str> = shared.iter().chain(&rest2).copied().collect();
        let p1 = self.reorder(&order1)?;
        let p2 = other.reorder(&order2)?;

        let dr1: usize = rest1.iter().map(|n| self.wire(n).unwrap().dim).product();
        let dr2: usize = rest2.iter().map(|n| other.wire(n).unwrap().dim).product();
        let ds: usize = shared.iter().map(|n| self.wire(n).unwrap().dim).product();

        // J[r1 r2; r1' r2'] = Σ_{t,s} J1[r1 t; r1' s] · J2[t r2; s r2']
        let j1 = p1.choi.as_slice();
        let j2 = p2.choi.as_slice();
        let n1 = dr1 * ds;
        let n2 = ds * dr2;
        let m1 = CMatrix::from_fn(dr1 * dr1, ds * ds, |row, col| {
            let (r1, r1p) = (row / dr1, row % dr1);
            let (t, s) = (col / ds, col % ds);
            j1[(r1 * ds + t) * n1 + r1p * ds + s]
        });
        let m2 = CMatrix::from_fn(ds * ds, dr2 * dr2, |row, col| {
            let (t, s) = (row / ds, row % ds);
            let (r2, r2p) = (col / dr2, col % dr2);
            j2[(t * dr2 + r2) * n2 + s * dr2 + r2p]
        });
        let q = m1.matmul(&m2);
        let n = dr1 * dr2;
        let qs = q.as_slice();
        let qc = dr2 * dr2;
        let choi = CMatrix::from_fn(n, n, |row, col| {
            let (r1, r2) = (row / dr2, row % dr2);
            let (r1p, r2p) = (col / dr2, col % dr2);
            qs[(r1 * dr1 + r1p) * qc + r2 * dr2 + r2p]
        });
        let wires = rest1
            .iter()
            .map(|n| self.wire(n).unwrap().clone())
            .chain(rest2.iter().map(|n| other.wire(n).unwrap().clone()))
            .collect();
        Process::new(wires, choi)
    }

    /// Tensor product with no contraction (requires disjoint wire names).
    pub fn parallel(&self, other: &Process) -> Result<Process> {
        if let Some(w) = self.wires.iter().find(|w| other.wire(&w.name).is_some()) {
            return Err(Error::Wire(format!("wire '{}' appears on both sides", w.name)));
        }
        self.link(other)
    }

    /// Largest deviation from trace preservation: `max |Tr_out J − I_in|`.
    pub fn tp_deviation(&self) -> f64 {
        let keep: Vec<usize> = (0..self.wires.len())
            .filter(|&i| self.wires[i].dir == Dir::In)
            .collect();
        let reduced = partial_trace(&self.choi, &self.dims(), &keep).expect("consistent dims");
        reduced.max_abs_diff(&CMatrix::identity(reduced.rows()))
    }

    /// Minimum eigenvalue of the Choi operator.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.choi.min_eigenvalue()
    }

    /// Checks complete positivity and trace preservation within `tol`.
    pub fn check_cptp(&self, tol: f64) -> Result<()> {
        let tp = self.tp_deviation();
        if tp > tol {
            return Err(Error::Invariant {
                quantity: "trace-preservation deviation".into(),
                value: tp,
                tol,
            });
        }
        let herm = self.choi.hermiticity_deviation();
        if herm > tol {
            return Err(Error::Invariant {
                quantity: "Choi hermiticity deviation".into(),
                value: herm,
                tol,
            });
        }
        let min = self.min_eigenvalue()?;
        if min < -tol {
            return Err(Error::Invariant {
                quantity: "negative Choi eigenvalue magnitude".into(),
                value: -min,
                tol,
            });
        }
        Ok(())
    }

    pub fn scale(&self, s: C64) -> Process {
        Process {
            wires: self.wires.clone(),
            choi: self.choi.scale(s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, phi_plus, r, tensor, Ket};

    fn unitary_process(u: &CMatrix, input: &str, output: &str) -> Process {
        Process::from_kraus(&[(output, u.rows())], &[(input, u.cols())], std::slice::from_ref(u)).unwrap()
    }

    #[test]
    fn identity_links_to_identity() {
        let a = Process::identity("in", "mid", 3);
        let b = Process::identity("mid", "out", 3);
        let ab = a.link(&b).unwrap().reorder(&["out", "in"]).unwrap();
        assert_eq!(ab.choi(), Process::identity("in", "out", 3).choi());
    }

    #[test]
    fn sequential_unitaries_compose() {
        let x = pauli(1);
        let z = pauli(3);
        let px = unitary_process(&x, "in", "mid");
        let pz = unitary_process(&z, "mid", "out");
        let composed = px.link(&pz).unwrap().reorder(&["out", "in"]).unwrap();
        let direct = unitary_process(&z.matmul(&x), "in", "out");
        assert!(composed.choi().max_abs_diff(direct.choi()) < 1e-14);
    }

    #[test]
    fn state_through_channel() {
        let rho = Ket::basis(2, 0).projector();
        let s = Process::state(&[("q", 2)], rho).unwrap();
        let x = unitary_process(&pauli(1), "q", "out");
        let out = s.link(&x).unwrap();
        assert_eq!(out.wires().len(), 1);
        assert!(out.choi().max_abs_diff(&Ket::basis(2, 1).projector()) < 1e-15);
    }

    #[test]
    fn link_requires_opposite_directions() {
        let a = Process::identity("in", "out", 2);
        let b = Process::identity("in", "other", 2);
        assert!(matches!(a.link(&b), Err(Error::Wire(_))));
    }

    #[test]
    fn merge_and_split_are_inverse() {
        let bell = Process::state(&[("a", 2), ("b", 2)], phi_plus().projector()).unwrap();
        let id = Process::identity("c", "d", 3);
        let p = bell.parallel(&id).unwrap();
        let m = p.merge(&["a", "d"], "ad").unwrap();
        assert_eq!(m.wire("ad").unwrap().dim, 6);
        let back = m.split("ad", &[("a", 2), ("d", 3)]).unwrap();
        let back = back.reorder(&["a", "b", "d", "c"]).unwrap();
        assert_eq!(back.choi(), p.choi());
    }

    #[test]
    fn trace_out_marginal() {
        let bell = Process::state(&[("a", 2), ("b", 2)], phi_plus().projector()).unwrap();
        let m = bell.trace_out(&["b"]).unwrap();
        assert!(m.choi().max_abs_diff(&CMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn cptp_checks() {
        let id = Process::identity("i", "o", 2);
        assert!(id.check_cptp(1e-12).is_ok());
        assert!(id.scale(r(1.1)).check_cptp(1e-9).is_err());
        let p = Process::from_kraus(&[("o", 2)], &[("i", 2)], &[tensor(&CMatrix::identity(1), &pauli(1))]).unwrap();
        assert!(p.tp_deviation() < 1e-15);
    }
}
