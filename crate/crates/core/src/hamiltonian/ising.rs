use super::pauli::{Pauli, PauliString, PauliSum, PauliTerm};
use crate::error::{Error, Result};

/// Periodic transverse-field Ising chain `−Σ ZᵢZᵢ₊₁ − g·Σ Xᵢ`.
///
/// At `n = 2` the two bonds coincide and merge into a single `−2·Z₀Z₁` term.
pub fn build_ising(n: usize, g: f64) -> Result<PauliSum> {
    if n < 2 {
        return Err(Error::Size(format!("Ising chain needs n >= 2, got {n}")));
    }
    let bonds = (0..n).map(|i| {
        let mut s = PauliString::identity(n);
        s.set(i, Pauli::Z);
        s.set((i + 1) % n, Pauli::Z);
        PauliTerm::new(-1.0, s)
    });
    let field = (0..n).map(|i| {
        let mut s = PauliString::identity(n);
        s.set(i, Pauli::X);
        PauliTerm::new(-g, s)
    });
    PauliSum::from_terms(n, bonds.chain(field))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_bonds_merge() {
        let h = build_ising(2, 0.0).unwrap();
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].coefficient, -2.0);
        assert_eq!(h.terms()[0].string.to_string(), "ZZ");
    }

    #[test]
    fn four_site_terms() {
        let h = build_ising(4, 2.0).unwrap();
        let zz = h.terms().iter().filter(|t| t.coefficient == -1.0).count();
        let x = h.terms().iter().filter(|t| t.coefficient == -2.0).count();
        assert_eq!((zz, x), (4, 4));
        assert_eq!(h.trace_h_squared(), 320.0);
    }

    #[test]
    fn trace_closed_form() {
        assert_eq!(build_ising(6, 2.0).unwrap().trace_h_squared(), 1920.0);
        for n in 3..=10 {
            let t = build_ising(n, 2.0).unwrap().trace_h_squared();
            assert_eq!(t, (n as f64) * 5.0 * (1u64 << n) as f64);
        }
    }

    #[test]
    fn rejects_single_site() {
        assert!(build_ising(1, 1.0).is_err());
    }
}
