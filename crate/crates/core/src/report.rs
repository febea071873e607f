//! End-to-end reports for the two bundled examples: `T^6 # (S x S^3)` with
//! `S` the Poincare homology sphere, and `T^4 # RP^4`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dtc::{
    l_lambda_dim, mu_dtc_bounds, presentation_dtc_data, rho_dtc_bounds, BoundReport,
    MIN_GENERATORS_CAP,
};
use crate::fpgroup::{
    abelianization, dim_hom_r, is_cyclic, parse_presentation, todd_coxeter, AbelianGroup,
    DEFAULT_MAX_COSETS,
};
use crate::freeprod::Window;
use crate::novhom::{
    hn_connected_sum, homology, ml_check, pro_abelianize, tensor_novikov, ChainComplex,
    NovikovModule,
};

pub const POINCARE_PRES: &str = include_str!("../fixtures/poincare.pres");
pub const Z2_PRES: &str = include_str!("../fixtures/z2.pres");
pub const RP4_COMPLEX: &str = include_str!("../fixtures/rp4.json");
pub const POINCARE_SPHERE_COMPLEX: &str = include_str!("../fixtures/poincare_sphere.json");

/// Window used for the pro-abelianization check in reports.
pub const REPORT_WINDOW: (i64, i64) = (0, 3);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Poincare,
    Rp4,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HurewiczWindowCheck {
    pub window: String,
    /// Abelianization of each truncated level, lowest level first.
    pub level_groups: Vec<AbelianGroup>,
    /// `G^ab`, the summand contributed by every level.
    pub summand: AbelianGroup,
    /// Whether every summand agrees with the coefficient group of `HN_1`.
    pub matches_hn1: bool,
    pub mittag_leffler_stable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub case: Case,
    pub manifold: String,
    pub dimension: i64,
    pub presentation: String,
    pub group_order: usize,
    pub abelianization: AbelianGroup,
    pub cyclic: bool,
    pub dim_hom_r: usize,
    pub l_lambda_dim: usize,
    pub mu_dtc: BoundReport,
    pub rho_dtc: BoundReport,
    /// `H_1(X)` and `H_2(X)`.
    pub homology_x: Vec<AbelianGroup>,
    /// `HN_0`, `HN_1`, `HN_2`.
    pub novikov_homology: Vec<NovikovModule>,
    pub hurewicz: HurewiczWindowCheck,
    pub conclusions: Vec<String>,
}

fn bound_phrase(name: &str, b: &BoundReport) -> String {
    match b.upper {
        Some(u) if u == b.lower => format!("{name} = {u}"),
        Some(u) => format!("{} <= {name} <= {u}", b.lower),
        None => format!("{name} >= {}", b.lower),
    }
}

/// Runs the full pipeline for one bundled example. Fixtures are compiled
/// in, so failures here are bugs rather than input errors.
pub fn build_report(case: Case) -> Report {
    let (pres_text, manifold, n, x) = match case {
        Case::Poincare => {
            let s =
                ChainComplex::from_json(POINCARE_SPHERE_COMPLEX).expect("bundled complex is valid");
            (
                POINCARE_PRES,
                "T^6 # (S x S^3), S the Poincare homology sphere",
                6,
                s.product(&ChainComplex::sphere(3)),
            )
        }
        Case::Rp4 => (
            Z2_PRES,
            "T^4 # RP^4",
            4,
            ChainComplex::from_json(RP4_COMPLEX).expect("bundled complex is valid"),
        ),
    };
    let p = parse_presentation(pres_text).expect("bundled presentation parses");
    let g = Arc::new(todd_coxeter(&p, DEFAULT_MAX_COSETS).expect("bundled group is finite"));

    let ab = abelianization(&p);
    let mu = mu_dtc_bounds(&g, MIN_GENERATORS_CAP).expect("order within budget");
    let rho = rho_dtc_bounds(&p, Some(&g)).expect("order within budget");
    let (gens, rels) = presentation_dtc_data(&g);
    let l_dim = l_lambda_dim(&gens, &rels).expect("relations reference known generators");

    let homology_x: Vec<AbelianGroup> = (1..=2)
        .map(|i| homology(&x, i).expect("degree in range"))
        .collect();
    let hn: Vec<NovikovModule> = (0..=2)
        .map(|i| hn_connected_sum(&x, i, n).expect("n >= 4 and i <= 2"))
        .collect();

    let window = Window::new(REPORT_WINDOW.0, REPORT_WINDOW.1).expect("lo <= hi");
    let sys = pro_abelianize(&g, window);
    let level_groups: Vec<AbelianGroup> = (0..sys.groups.len()).map(|j| sys.group(j)).collect();
    let hn1 = &hn[1];
    let hurewicz = HurewiczWindowCheck {
        window: window.to_string(),
        matches_hn1: tensor_novikov(&ab) == *hn1,
        summand: ab.clone(),
        level_groups,
        mittag_leffler_stable: ml_check(&sys, 1).expect("window has 3 maps").stable,
    };

    let mut conclusions = vec![
        format!(
            "{}, {}; HN_1 = {}, HN_2 = {}",
            bound_phrase("mu_DTC", &mu),
            bound_phrase("rho_DTC", &rho),
            hn[1],
            hn[2]
        ),
        format!(
            "every Morse 1-form in u has >= {} index-1 and >= {} index-2 critical points",
            mu.lower, rho.lower
        ),
    ];
    if hn[1].is_zero() && hn[2].is_zero() && mu.lower > 0 {
        conclusions.push(
            "Novikov homology vanishes in degrees 1 and 2 while the Novikov fundamental group is nontrivial".into(),
        );
    }

    Report {
        case,
        manifold: manifold.into(),
        dimension: n,
        presentation: p.to_string(),
        group_order: g.order(),
        abelianization: ab,
        cyclic: is_cyclic(&g),
        dim_hom_r: dim_hom_r(&p),
        l_lambda_dim: l_dim,
        mu_dtc: mu,
        rho_dtc: rho,
        homology_x,
        novikov_homology: hn,
        hurewicz,
        conclusions,
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "M = {} (n = {}), u = first circle coordinate of the torus",
            self.manifold, self.dimension
        )?;
        writeln!(f, "pi_1(X) presented by:")?;
        for line in self.presentation.lines() {
            writeln!(f, "  {line}")?;
        }
        writeln!(
            f,
            "group order {}, cyclic: {}, abelianization {}",
            self.group_order,
            if self.cyclic { "yes" } else { "no" },
            self.abelianization
        )?;
        writeln!(
            f,
            "dim Hom(G, R) = {}, dim L_Lambda = {}",
            self.dim_hom_r, self.l_lambda_dim
        )?;
        writeln!(f, "{}", self.mu_dtc)?;
        writeln!(f, "{}", self.rho_dtc)?;
        writeln!(
            f,
            "H_1(X) = {}; H_2(X) = {}",
            self.homology_x[0], self.homology_x[1]
        )?;
        let hn: Vec<String> = self
            .novikov_homology
            .iter()
            .enumerate()
            .map(|(i, m)| format!("HN_{i} = {m}"))
            .collect();
        writeln!(f, "{}", hn.join(", "))?;
        let levels: Vec<String> = self
            .hurewicz
            .level_groups
            .iter()
            .map(|g| format!("({g})"))
            .collect();
        writeln!(
            f,
            "pro-abelianization on window {}: {}",
            self.hurewicz.window,
            levels.join(" -> ")
        )?;
        writeln!(
            f,
            "  summand per level ({}) {} the coefficients of HN_1; Mittag-Leffler (K = 1, window-relative): {}",
            self.hurewicz.summand,
            if self.hurewicz.matches_hn1 { "matches" } else { "does not match" },
            if self.hurewicz.mittag_leffler_stable { "stable" } else { "not stable" }
        )?;
        for c in &self.conclusions {
            writeln!(f, "conclusion: {c}")?;
        }
        Ok(())
    }
}
