//! Closed-form point counts and group orders.

use crate::model::{Family, Params};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub family: Family,
    pub q0: u64,
    pub q: u64,
    pub d: u32,
    pub g_order: u128,
    pub b_order: u128,
    pub t_order: u128,
    /// Exact-degree counts for n = 1, d, d + 1.
    pub n1: u128,
    pub nd: u128,
    pub nd1: u128,
}

pub fn expected_counts(p: &Params) -> CountTable {
    let (q0, q) = (p.q0 as u128, p.q as u128);
    let (g, b, t, nd) = match p.family {
        Family::Su3 => {
            let c = q0 * q0 * q0;
            (c * (c + 1) * (q - 1), c * (q - 1), q - q0 + 1, c * (q0 + 1) * (q - 1))
        }
        Family::Sz => (q * q * (q * q + 1) * (q - 1), q * q * (q - 1), q - 2 * q0 + 1, q * q * (q + 2 * q0 + 1) * (q - 1)),
        Family::Ree => {
            let c = q * q * q;
            (c * (c + 1) * (q - 1), c * (q - 1), q - 3 * q0 + 1, c * (q + 3 * q0 + 1) * (q * q - 1))
        }
    };
    CountTable {
        family: p.family,
        q0: p.q0,
        q: p.q,
        d: p.d,
        g_order: g,
        b_order: b,
        t_order: t,
        // |G^σ/B^σ| F_q-points, and the F_{q^{d+1}}-points form a regular G^σ-orbit.
        n1: g / b,
        nd,
        nd1: g,
    }
}

impl CountTable {
    /// Expected number of exact-degree-n points, where a closed form exists.
    pub fn expected(&self, n: u32) -> Option<u128> {
        match n {
            1 => Some(self.n1),
            n if n < self.d => Some(0),
            n if n == self.d => Some(self.nd),
            n if n == self.d + 1 => Some(self.nd1),
            _ => None,
        }
    }

    /// |G^σ| / (|B^σ|·|T^σ|), which equals the degree of the curve.
    pub fn embedding_degree(&self) -> Option<u128> {
        let den = self.b_order * self.t_order;
        (self.g_order % den == 0).then(|| self.g_order / den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instantiated_tables() {
        let t = expected_counts(&Params::su3(2, 1));
        assert_eq!((t.n1, t.nd, t.nd1), (9, 72, 216));
        let t = expected_counts(&Params::su3(3, 1));
        assert_eq!((t.n1, t.nd, t.nd1), (28, 864, 6048));
        let t = expected_counts(&Params::sz(1));
        assert_eq!((t.n1, t.nd, t.nd1), (65, 5824, 29120));
        let t = expected_counts(&Params::sz(0));
        assert_eq!((t.n1, t.nd, t.nd1), (5, 20, 20));
        let t = expected_counts(&Params::ree(0));
        assert_eq!((t.n1, t.nd, t.nd1), (28, 27 * 7 * 8, 27 * 28 * 2));
        assert_eq!(expected_counts(&Params::ree(1)).n1, 19684);
    }

    #[test]
    fn degree_identity() {
        for p in [Params::su3(2, 1), Params::su3(3, 1), Params::su3(2, 2), Params::sz(0), Params::sz(1), Params::sz(2), Params::ree(0), Params::ree(1)] {
            let t = expected_counts(&p);
            assert_eq!(t.embedding_degree(), Some(p.curve_degree() as u128), "{p:?}");
        }
    }
}
