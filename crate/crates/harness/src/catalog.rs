use crate::config::ExperimentName;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub summary: &'static str,
    /// The results the experiment exercises, by title.
    pub results: &'static [&'static str],
}

fn entry(name: ExperimentName) -> CatalogEntry {
    let (summary, results): (&str, &[&str]) = match name {
        ExperimentName::IntegralOracles => (
            "closed-form reproduction of |Γ(ib)|, the principal-value integral and the unit-range integrals",
            &[
                "Gamma modulus identity on the imaginary axis",
                "principal-value integral of e^{-itρ} ρ^{-1+ib}",
                "Abel-regularized unit-range integrals",
            ],
        ),
        ExperimentName::BoundSweeps => (
            "grid sweeps of every complex-integral bound, explicit and unnamed constants",
            &[
                "half-line integral bound with constant 4",
                "uniform bound on truncated sine integrals",
                "segment integral bound 2|x| + 1",
                "uniform bounds for principal-value and annulus integrals",
            ],
        ),
        ExperimentName::DecayFits => (
            "sup-norm decay exponents of dispersive kernels",
            &[
                "dispersive estimate for the Schrödinger group",
                "dispersive estimate for the non-elliptic Schrödinger group",
                "small- and large-time Boussinesq decay",
            ],
        ),
        ExperimentName::StrichartzRatios => (
            "Strichartz ratios of random orthonormal systems on the circle across system sizes",
            &["Strichartz estimate for orthonormal systems on the torus", "Strichartz estimate for orthonormal systems"],
        ),
        ExperimentName::Optimality => (
            "N-scaling of the lattice test family at and above the critical Schatten exponent",
            &["optimality of the Schatten exponent"],
        ),
        ExperimentName::SchattenBounds => (
            "Schatten norms of W T T* W for Gaussian weights",
            &["Schatten bound for weighted restriction operators", "Boussinesq orthonormal Strichartz estimate"],
        ),
        ExperimentName::Duality => (
            "empirical constants on both sides of the Schatten/density duality",
            &["duality principle between Schatten bounds and density estimates"],
        ),
        ExperimentName::Vanishing => (
            "Schatten norm over shrinking time windows",
            &["vanishing of the Strichartz norm on short time intervals"],
        ),
        ExperimentName::Khinchin => (
            "Monte Carlo L^r moments of random sign and Gaussian sums",
            &["Khinchin inequality"],
        ),
        ExperimentName::L2lp => (
            "L^p_ω L²_x estimates for randomized operators as t → 0",
            &["probabilistic L^p estimate for randomized data", "Wiener randomization"],
        ),
        ExperimentName::Moments => (
            "moment bounds for fully randomized functions before and after the flow",
            &["moment bound for randomized initial data"],
        ),
        ExperimentName::Convergence => (
            "tail probabilities of the density difference on the torus and the ball",
            &[
                "convergence in measure of randomized densities on the torus",
                "convergence in measure of randomized densities on the ball",
            ],
        ),
    };
    CatalogEntry {
        name: name.as_str(),
        summary,
        results,
    }
}

/// Every experiment, in a fixed order.
pub fn list_experiments() -> Vec<CatalogEntry> {
    ExperimentName::ALL.into_iter().map(entry).collect()
}

pub fn render_text(entries: &[CatalogEntry]) -> String {
    let width = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
    entries
        .iter()
        .map(|e| format!("{:width$}  {} [{}]\n", e.name, e.summary, e.results.join("; ")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_entries_each_naming_a_result() {
        let c = list_experiments();
        assert_eq!(c.len(), 12);
        assert!(c.iter().all(|e| !e.results.is_empty()));
        assert_eq!(c[0].name, "integral-oracles");
        assert_eq!(c[11].name, "convergence");
    }
}
