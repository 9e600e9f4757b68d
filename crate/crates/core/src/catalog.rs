//! Built-in catalog: the series under test with their closed forms, the
//! paired-kernel proof tasks, the z-parameter identities, and the theta-link
//! specializations connecting them. Every entry carries its DSL source text.

use crate::bigfloat::AlgebraicConstant;
use crate::error::{Error, Result};
use crate::hyperterm::{parse_term, HyperTerm};
use crate::rat::{rat, rat_int, Rat};

/// A single series with a known closed form c*sqrt(d)/pi.
#[derive(Clone, Debug)]
pub struct SeriesCatalogEntry {
    pub id: &'static str,
    /// Kernel in the summation variable only, DSL text.
    pub source: &'static str,
    pub closed_form: AlgebraicConstant,
    /// Attribution of the formula.
    pub note: &'static str,
}

impl SeriesCatalogEntry {
    pub fn kernel(&self) -> Result<HyperTerm> {
        parse_term(self.source)
    }
}

/// A paired-kernel task: prove r_k = s_k for integers k, then specialize.
#[derive(Clone, Debug)]
pub struct ProofTask {
    pub id: &'static str,
    pub a_source: &'static str,
    pub b_source: &'static str,
    pub sum_var: &'static str,
    pub rec_var: &'static str,
    /// Initial values the common recurrence needs (the expected order).
    pub initial_range: usize,
    /// Non-integer specialization point (e.g. -1/2, -1/6).
    pub k_star: Rat,
    /// Catalog id of the series obtained at the specialization point.
    pub series_id: &'static str,
    /// s(k_star) = specialization_scale * closed form of `series_id`.
    pub specialization_scale: AlgebraicConstant,
    /// Catalog id of the already-proved series the task reduces to.
    pub anchor_id: Option<&'static str>,
}

impl ProofTask {
    pub fn a(&self) -> Result<HyperTerm> {
        parse_term(self.a_source)
    }

    pub fn b(&self) -> Result<HyperTerm> {
        parse_term(self.b_source)
    }

    pub fn series(&self) -> Result<SeriesCatalogEntry> {
        series_entry(self.series_id)
            .ok_or_else(|| Error::Internal(format!("unknown series id {}", self.series_id)))
    }
}

/// A two-sided identity in the free parameter z, checked at integer k.
#[derive(Clone, Debug)]
pub struct ZIdentityTask {
    pub id: &'static str,
    pub left_source: &'static str,
    pub right_source: &'static str,
    pub note: &'static str,
}

impl ZIdentityTask {
    pub fn left(&self) -> Result<HyperTerm> {
        parse_term(self.left_source)
    }

    pub fn right(&self) -> Result<HyperTerm> {
        parse_term(self.right_source)
    }
}

/// A theta-operator specialization: applying a + b*theta (theta = z d/dz) to
/// a z-identity side at z = z0 reproduces `scale` times a catalog series.
#[derive(Clone, Debug)]
pub struct ThetaLink {
    pub z_task_id: &'static str,
    /// The z-kernel family already specialized at the task's k value.
    pub family_source: &'static str,
    pub k_star: Rat,
    pub a: Rat,
    pub b: Rat,
    pub z0: Rat,
    pub series_id: &'static str,
    /// weighted value = scale * closed form of `series_id`; pi-free.
    pub scale: AlgebraicConstant,
}

impl ThetaLink {
    pub fn family(&self) -> Result<HyperTerm> {
        parse_term(self.family_source)
    }
}

pub const SERIES_65_8: &str = "vars: n\n\
    poch(1/2,n)*poch(1/4,n)*poch(3/4,n) / poch(1,n)^3 * (-1)^n * (16/63)^(2*n) * (65*n+8)";
pub const SERIES_126_10: &str = "vars: n\n\
    poch(1/2,n)*poch(1/6,n)*poch(5/6,n) / poch(1,n)^3 * (2/11)^(3*n) * (126*n+10)";
pub const SERIES_63_8: &str = "vars: n\n\
    poch(1/2,n)*poch(1/6,n)*poch(5/6,n) / poch(1,n)^3 * (-4/5)^(3*n) * (63*n+8)";
pub const SERIES_7_1: &str = "vars: n\n\
    poch(1/2,n)*poch(1/4,n)*poch(3/4,n) / poch(1,n)^3 * (32/81)^n * (7*n+1)";
pub const SERIES_28_3: &str = "vars: n\n\
    poch(1/2,n)*poch(1/6,n)*poch(5/6,n) / poch(1,n)^3 * (3/5)^(3*n) * (28*n+3)";
pub const SERIES_11_1: &str = "vars: n\n\
    poch(1/2,n)*poch(1/6,n)*poch(5/6,n) / poch(1,n)^3 * (4/125)^n * (11*n+1)";
pub const SERIES_133_8: &str = "vars: n\n\
    poch(1/2,n)*poch(1/6,n)*poch(5/6,n) / poch(1,n)^3 * (4/85)^(3*n) * (133*n+8)";
pub const SERIES_ANCHOR: &str = "vars: n\n\
    poch(1/2,n)^3 / poch(1,n)^3 * (1/64)^n * (42*n+5)";

pub const EX1_A: &str = "vars: n, k\n\
    3 * (64/63)^k * poch(-k,n)*poch(1/2,n)^2 / (poch(1/2-k,n)^2*poch(1,n)) \
    * (1/64)^n * (42*n+5)";
pub const EX1_B: &str = "vars: n, k\n\
    poch(-k,n)*poch(-1/2*k,n)*poch(1/2-1/2*k,n) / (poch(1/2-k,n)^2*poch(1,n)) \
    * (-1)^n * (16/63)^(2*n) * (130*n-2*k+15)";
pub const EX2_A: &str = "vars: n, k\n\
    11 * (32/33)^(3*k) * poch(-3*k,n)*poch(1/3-k,n)*poch(1/6-2*k,n) \
    / (poch(2/3-2*k,n)*poch(1/3-4*k,n)*poch(1,n)) * (-1/8)^n * (6*n+1)";
pub const EX2_B: &str = "vars: n, k\n\
    poch(-k,n)*poch(1/3-k,n)*poch(2/3-k,n) \
    / (poch(5/6-k,n)*poch(2/3-2*k,n)*poch(1,n)) * (2/11)^(3*n) * (126*n+6*k+11)";
pub const EX3_A: &str = "vars: n, k\n\
    5 * poch(-3*k,n)*poch(2/3+k,n)*poch(1/3-k,n) \
    / (poch(5/6-k,n)*poch(2/3-2*k,n)*poch(1,n)) * (1/64)^n * (42*n+5)";
pub const EX3_B: &str = "vars: n, k\n\
    (15/16)^(3*k) * poch(-k,n)*poch(1/3-k,n)*poch(2/3-k,n) \
    / (poch(5/6-k,n)*poch(2/3-2*k,n)*poch(1,n)) * (-64/125)^n * (252*n-42*k+25)";

pub const EX4_LEFT: &str = "vars: n, k, z\n\
    poch(-k,n)*poch(1/2,n)^2 / (poch(1/2-k,n)^2*poch(1,n)) * z^n";
pub const EX4_RIGHT: &str = "vars: n, k, z\n\
    (1-z)^(k-2*n) * (-4*z)^n * poch(-k,n)*poch(-1/2*k,n)*poch(1/2-1/2*k,n) \
    / (poch(1/2-k,n)^2*poch(1,n))";
pub const EX5_LEFT: &str = "vars: n, k, z\n\
    poch(-3*k,n)*poch(1/3-k,n)*poch(1/6-2*k,n) \
    / (poch(2/3-2*k,n)*poch(1/3-4*k,n)*poch(1,n)) * z^n";
pub const EX5_RIGHT: &str = "vars: n, k, z\n\
    (1/64)^k * (4-z)^(3*k-3*n) * 27^n * z^(2*n) * poch(-k,n)*poch(1/3-k,n)*poch(2/3-k,n) \
    / (poch(5/6-k,n)*poch(2/3-2*k,n)*poch(1,n))";

/// The central-kernel family both theta links specialize to:
/// Example 4's left side at k = -1/2 and Example 5's left side at k = -1/6.
pub const HALF_CUBED_FAMILY: &str = "vars: n, z\npoch(1/2,n)^3 / poch(1,n)^3 * z^n";

pub fn series_entries() -> Vec<SeriesCatalogEntry> {
    vec![
        SeriesCatalogEntry {
            id: "65-8",
            source: SERIES_65_8,
            closed_form: AlgebraicConstant::new(rat_int(9), 7, -1),
            note: "due to Berndt, Chan and Liaw",
        },
        SeriesCatalogEntry {
            id: "126-10",
            source: SERIES_126_10,
            closed_form: AlgebraicConstant::new(rat(11, 2), 33, -1),
            note: "due to the Borwein brothers",
        },
        SeriesCatalogEntry {
            id: "63-8",
            source: SERIES_63_8,
            closed_form: AlgebraicConstant::new(rat_int(5), 15, -1),
            note: "due to Baruah and Berndt",
        },
        SeriesCatalogEntry {
            id: "7-1",
            source: SERIES_7_1,
            closed_form: AlgebraicConstant::new(rat(9, 2), 1, -1),
            note: "due to Berndt, Chan and Liaw",
        },
        SeriesCatalogEntry {
            id: "28-3",
            source: SERIES_28_3,
            closed_form: AlgebraicConstant::new(rat_int(5), 5, -1),
            note: "due to the Borwein brothers",
        },
        SeriesCatalogEntry {
            id: "11-1",
            source: SERIES_11_1,
            closed_form: AlgebraicConstant::new(rat(5, 6), 15, -1),
            note: "due to Ramanujan",
        },
        SeriesCatalogEntry {
            id: "133-8",
            source: SERIES_133_8,
            closed_form: AlgebraicConstant::new(rat(85, 54), 255, -1),
            note: "due to Ramanujan",
        },
        SeriesCatalogEntry {
            id: "anchor",
            source: SERIES_ANCHOR,
            closed_form: AlgebraicConstant::new(rat_int(16), 1, -1),
            note: "already proved by the WZ method; used here as a numeric anchor",
        },
    ]
}

pub fn series_entry(id: &str) -> Option<SeriesCatalogEntry> {
    series_entries().into_iter().find(|e| e.id == id)
}

pub fn proof_tasks() -> Vec<ProofTask> {
    vec![
        ProofTask {
            id: "example-1",
            a_source: EX1_A,
            b_source: EX1_B,
            sum_var: "n",
            rec_var: "k",
            initial_range: 3,
            k_star: rat(-1, 2),
            series_id: "65-8",
            // weight 130n - 2k + 15 at k = -1/2 is 2*(65n + 8)
            specialization_scale: AlgebraicConstant::new(rat_int(2), 1, 0),
            anchor_id: Some("anchor"),
        },
        ProofTask {
            id: "example-2",
            a_source: EX2_A,
            b_source: EX2_B,
            sum_var: "n",
            rec_var: "k",
            initial_range: 3,
            k_star: rat(-1, 6),
            series_id: "126-10",
            // weight 126n + 6k + 11 at k = -1/6 is exactly 126n + 10
            specialization_scale: AlgebraicConstant::new(rat_int(1), 1, 0),
            anchor_id: None,
        },
        ProofTask {
            id: "example-3",
            a_source: EX3_A,
            b_source: EX3_B,
            sum_var: "n",
            rec_var: "k",
            initial_range: 3,
            k_star: rat(-1, 6),
            series_id: "63-8",
            // (15/16)^(3k) at k = -1/6 is 4/sqrt(15) and the weight is
            // 4*(63n + 8): together 16*sqrt(15)/15
            specialization_scale: AlgebraicConstant::new(rat(16, 15), 15, 0),
            anchor_id: None,
        },
    ]
}

pub fn proof_task(id: &str) -> Option<ProofTask> {
    proof_tasks().into_iter().find(|t| t.id == id)
}

pub fn z_tasks() -> Vec<ZIdentityTask> {
    vec![
        ZIdentityTask {
            id: "example-4",
            left_source: EX4_LEFT,
            right_source: EX4_RIGHT,
            note: "Whipple-type quadratic transformation, argument -4z/(1-z)^2",
        },
        ZIdentityTask {
            id: "example-5",
            left_source: EX5_LEFT,
            right_source: EX5_RIGHT,
            note: "Bailey-type cubic transformation, argument 27z^2/(4-z)^3, \
                prefactor ((4-z)/4)^(3k)",
        },
    ]
}

pub fn z_task(id: &str) -> Option<ZIdentityTask> {
    z_tasks().into_iter().find(|t| t.id == id)
}

pub fn theta_links() -> Vec<ThetaLink> {
    vec![
        ThetaLink {
            z_task_id: "example-4",
            family_source: HALF_CUBED_FAMILY,
            k_star: rat(-1, 2),
            a: rat_int(5),
            b: rat_int(42),
            z0: rat(1, 64),
            series_id: "anchor",
            scale: AlgebraicConstant::new(rat_int(1), 1, 0),
        },
        ThetaLink {
            z_task_id: "example-5",
            family_source: HALF_CUBED_FAMILY,
            k_star: rat(-1, 6),
            a: rat_int(1),
            b: rat_int(6),
            z0: rat(1, 4),
            series_id: "11-1",
            // (1 + 6 theta) at z = 1/4 gives 4/pi = (8 sqrt(15)/25)*(5 sqrt(15)/(6 pi))
            scale: AlgebraicConstant::new(rat(8, 25), 15, 0),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_sources_parse() {
        for e in series_entries() {
            let t = e.kernel().unwrap();
            assert_eq!(t.sum_var(), "n", "{}", e.id);
        }
        for t in proof_tasks() {
            t.a().unwrap();
            t.b().unwrap();
        }
        for t in z_tasks() {
            t.left().unwrap();
            t.right().unwrap();
        }
        for l in theta_links() {
            l.family().unwrap();
        }
    }

    #[test]
    fn lookups_work() {
        assert!(series_entry("65-8").is_some());
        assert!(series_entry("no-such").is_none());
        assert!(proof_task("example-2").is_some());
        assert!(z_task("example-5").is_some());
    }
}
