//! Certificates of `(r, eps)`-proximality shared by the projective and
//! boundary certifiers.

use std::fmt;

use crate::tolerances::TAU_MARGIN;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Certified,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Certified => "certified",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Outcome of a sampled `(r, eps)` check.
///
/// `Certified` means certified at the recorded resolution: the three
/// conditions held on every sample, which is not a proof for the whole
/// domain. `Refuted` means some sample violated a condition by more than
/// the refutation margin.
#[derive(Clone, Debug, PartialEq)]
pub struct ProximalityCertificate {
    pub r: f64,
    pub eps: f64,
    pub gap: f64,
    pub image_radius: f64,
    pub lipschitz_estimate: f64,
    pub resolution: usize,
    pub samples: usize,
    pub pairs: usize,
    pub verdict: Verdict,
}

/// Boundary certificates have the same shape; distances are Bourdon.
pub type BoundaryCertificate = ProximalityCertificate;

impl ProximalityCertificate {
    /// Builds the certificate and its verdict from measured quantities.
    #[allow(clippy::too_many_arguments)]
    pub fn from_measurements(
        r: f64,
        eps: f64,
        gap: f64,
        image_radius: f64,
        lipschitz_estimate: f64,
        resolution: usize,
        samples: usize,
        pairs: usize,
    ) -> Self {
        let worst = [2.0 * r - gap, image_radius - eps, lipschitz_estimate - eps]
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        let verdict = if worst.is_nan() {
            Verdict::Inconclusive
        } else if worst <= 0.0 && samples > 0 && pairs > 0 {
            Verdict::Certified
        } else if worst > TAU_MARGIN {
            Verdict::Refuted
        } else {
            Verdict::Inconclusive
        };
        Self {
            r,
            eps,
            gap,
            image_radius,
            lipschitz_estimate,
            resolution,
            samples,
            pairs,
            verdict,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.verdict == Verdict::Certified
    }

    /// Which of the three conditions failed on the samples.
    pub fn failed_conditions(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.gap < 2.0 * self.r {
            out.push("gap");
        }
        if self.image_radius > self.eps {
            out.push("containment");
        }
        if self.lipschitz_estimate > self.eps {
            out.push("lipschitz");
        }
        out
    }

    pub fn caveat(&self) -> String {
        format!(
            "sampled check at resolution {} ({} points, {} pairs); certified means no sampled violation",
            self.resolution, self.samples, self.pairs
        )
    }
}
