//! Isotropic materials, wave numbers and the concentric layer geometry.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

/// Why a material triple is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MaterialIssue {
    NonFinite,
    NonPositiveShear,
    NotStronglyConvex,
    NonPositiveDensity,
}

impl core::fmt::Display for MaterialIssue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            MaterialIssue::NonFinite => "parameters must be finite",
            MaterialIssue::NonPositiveShear => "mu must be positive",
            MaterialIssue::NotStronglyConvex => "3*lambda + 2*mu must be positive",
            MaterialIssue::NonPositiveDensity => "rho must be positive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MediumError {
    #[error("invalid material: {0}")]
    Material(MaterialIssue),
    #[error("angular frequency must be finite and positive, got {0}")]
    Omega(f64),
    #[error("invalid layer stack: {0}")]
    Stack(InvalidStack),
}

/// Isotropic elastic solid `(λ, μ, ρ)` with `μ > 0`, `3λ + 2μ > 0`, `ρ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Material {
    pub lambda: f64,
    pub mu: f64,
    pub rho: f64,
}

impl Material {
    pub fn new(lambda: f64, mu: f64, rho: f64) -> Result<Self, MediumError> {
        let m = Self { lambda, mu, rho };
        match m.issue() {
            Some(i) => Err(MediumError::Material(i)),
            None => Ok(m),
        }
    }

    /// `λ = μ = ρ = 1`.
    pub fn unit() -> Self {
        Self { lambda: 1.0, mu: 1.0, rho: 1.0 }
    }

    pub fn issue(&self) -> Option<MaterialIssue> {
        if !(self.lambda.is_finite() && self.mu.is_finite() && self.rho.is_finite()) {
            Some(MaterialIssue::NonFinite)
        } else if self.mu <= 0.0 {
            Some(MaterialIssue::NonPositiveShear)
        } else if 3.0 * self.lambda + 2.0 * self.mu <= 0.0 {
            Some(MaterialIssue::NotStronglyConvex)
        } else if self.rho <= 0.0 {
            Some(MaterialIssue::NonPositiveDensity)
        } else {
            None
        }
    }

    pub fn c_p(&self) -> f64 {
        ((self.lambda + 2.0 * self.mu) / self.rho).sqrt()
    }

    pub fn c_s(&self) -> f64 {
        (self.mu / self.rho).sqrt()
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.lambda, self.mu, self.rho]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WaveNumbers {
    pub kappa_p: f64,
    pub kappa_s: f64,
    pub c_p: f64,
    pub c_s: f64,
}

pub fn wave_numbers(mat: &Material, omega: f64) -> Result<WaveNumbers, MediumError> {
    if let Some(i) = mat.issue() {
        return Err(MediumError::Material(i));
    }
    if !(omega.is_finite() && omega > 0.0) {
        return Err(MediumError::Omega(omega));
    }
    let (c_p, c_s) = (mat.c_p(), mat.c_s());
    Ok(WaveNumbers { kappa_p: omega / c_p, kappa_s: omega / c_s, c_p, c_s })
}

/// Structural problem found by [`validate_stack`]; layer indices count the
/// background as 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StackIssue {
    RadiiCount { expected: usize, found: usize },
    NonPositiveRadius { index: usize, value: f64 },
    RadiiNotDecreasing { index: usize },
    Material { layer: usize, issue: MaterialIssue },
}

impl core::fmt::Display for StackIssue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            StackIssue::RadiiCount { expected, found } => {
                write!(f, "radii: expected {expected} values (one per layer plus the core), found {found}")
            }
            StackIssue::NonPositiveRadius { index, value } => {
                write!(f, "radii[{index}] must be positive and finite, got {value}")
            }
            StackIssue::RadiiNotDecreasing { index } => {
                write!(f, "radii must be strictly decreasing (radii[{index}] >= radii[{}])", index - 1)
            }
            StackIssue::Material { layer: 0, issue } => write!(f, "background: {issue}"),
            StackIssue::Material { layer, issue } => write!(f, "layers[{}]: {issue}", layer - 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvalidStack {
    pub issues: Vec<StackIssue>,
}

impl core::fmt::Display for InvalidStack {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// Layer whose contrast with the background does not satisfy
/// `(μ₀ − μ)(λ₀ − λ) ≥ 0` with at least one parameter differing.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContrastWarning {
    pub layer: usize,
}

/// Background medium, `L ≥ 0` homogeneous shells and a traction-free core.
///
/// `radii[0] > radii[1] > … > radii[L]`; layer `ℓ` occupies
/// `radii[ℓ] < |x| < radii[ℓ-1]` and the core is `|x| < radii[L]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LayerStack {
    radii: Vec<f64>,
    background: Material,
    layers: Vec<Material>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedStack {
    pub stack: LayerStack,
    pub warnings: Vec<ContrastWarning>,
}

/// Checks radii and materials, collecting every structural issue.
pub fn validate_stack(
    radii: &[f64],
    background: Material,
    layers: &[Material],
) -> Result<ValidatedStack, InvalidStack> {
    let mut issues = Vec::new();
    if radii.len() != layers.len() + 1 {
        issues.push(StackIssue::RadiiCount { expected: layers.len() + 1, found: radii.len() });
    }
    for (i, &r) in radii.iter().enumerate() {
        if !(r.is_finite() && r > 0.0) {
            issues.push(StackIssue::NonPositiveRadius { index: i, value: r });
        }
        if i > 0 && r.partial_cmp(&radii[i - 1]) != Some(core::cmp::Ordering::Less) {
            issues.push(StackIssue::RadiiNotDecreasing { index: i });
        }
    }
    for (l, m) in core::iter::once(&background).chain(layers).enumerate() {
        if let Some(issue) = m.issue() {
            issues.push(StackIssue::Material { layer: l, issue });
        }
    }
    if !issues.is_empty() {
        return Err(InvalidStack { issues });
    }
    let warnings = layers
        .iter()
        .enumerate()
        .filter(|(_, m)| {
            let dmu = background.mu - m.mu;
            let dla = background.lambda - m.lambda;
            dmu * dla < 0.0 || (dmu == 0.0 && dla == 0.0)
        })
        .map(|(i, _)| ContrastWarning { layer: i + 1 })
        .collect();
    Ok(ValidatedStack {
        stack: LayerStack { radii: radii.to_vec(), background, layers: layers.to_vec() },
        warnings,
    })
}

/// Radii `2 = r_1 > … > r_{L+1} = 1`, equally spaced.
pub fn default_radii(layer_count: usize) -> Vec<f64> {
    if layer_count == 0 {
        return alloc::vec![1.0];
    }
    (0..=layer_count).map(|i| 2.0 - i as f64 / layer_count as f64).collect()
}

impl LayerStack {
    pub fn new(radii: Vec<f64>, background: Material, layers: Vec<Material>) -> Result<Self, MediumError> {
        validate_stack(&radii, background, &layers)
            .map(|v| v.stack)
            .map_err(MediumError::Stack)
    }

    /// Stack on [`default_radii`].
    pub fn with_default_radii(background: Material, layers: Vec<Material>) -> Result<Self, MediumError> {
        Self::new(default_radii(layers.len()), background, layers)
    }

    /// Uncoated cavity of the given radius.
    pub fn bare_cavity(background: Material, radius: f64) -> Result<Self, MediumError> {
        Self::new(alloc::vec![radius], background, Vec::new())
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn background(&self) -> &Material {
        &self.background
    }

    pub fn layers(&self) -> &[Material] {
        &self.layers
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    /// Material of region `ℓ`, with the background at `ℓ = 0`.
    pub fn material(&self, l: usize) -> &Material {
        if l == 0 {
            &self.background
        } else {
            &self.layers[l - 1]
        }
    }

    pub fn core_radius(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Same materials, every radius multiplied by `s > 0`.
    pub fn scaled(&self, s: f64) -> Result<Self, MediumError> {
        Self::new(self.radii.iter().map(|r| r * s).collect(), self.background, self.layers.clone())
    }

    /// Same geometry with different layer materials.
    pub fn with_layers(&self, layers: Vec<Material>) -> Result<Self, MediumError> {
        Self::new(self.radii.clone(), self.background, layers)
    }

    /// The uncoated cavity occupying the same core.
    pub fn bare(&self) -> Self {
        Self { radii: alloc::vec![self.core_radius()], background: self.background, layers: Vec::new() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wave_number_examples() {
        let w = wave_numbers(&Material::unit(), 1.0).unwrap();
        assert!((w.kappa_p - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(w.kappa_s, 1.0);
        let w = wave_numbers(&Material::new(2.9, 0.7, 0.9).unwrap(), 1.0).unwrap();
        assert!((w.kappa_s - 1.133893419027682).abs() < 1e-12);
        assert!(matches!(Material::new(1.0, 0.0, 1.0), Err(MediumError::Material(MaterialIssue::NonPositiveShear))));
        assert!(matches!(Material::new(-1.0, 1.0, 1.0), Err(MediumError::Material(MaterialIssue::NotStronglyConvex))));
        assert!(wave_numbers(&Material::unit(), 0.0).is_err());
    }

    #[test]
    fn stack_validation() {
        let layer = Material::new(2.9, 0.7, 0.9).unwrap();
        let v = validate_stack(&[2.0, 1.0], Material::unit(), &[layer]).unwrap();
        assert_eq!(v.stack.layer_count(), 1);
        let err = validate_stack(&[1.0, 2.0], Material::unit(), &[layer]).unwrap_err();
        assert_eq!(err.issues, alloc::vec![StackIssue::RadiiNotDecreasing { index: 1 }]);
        let bad = Material { lambda: -1.0, mu: 1.0, rho: 1.0 };
        let err = validate_stack(&[2.0, 1.5, 1.0], Material::unit(), &[layer, bad]).unwrap_err();
        assert_eq!(err.issues, alloc::vec![StackIssue::Material { layer: 2, issue: MaterialIssue::NotStronglyConvex }]);
        assert!(validate_stack(&[2.0], Material::unit(), &[layer]).is_err());
    }

    #[test]
    fn contrast_warning_only_for_mixed_contrast() {
        let v = validate_stack(&[2.0, 1.0], Material::unit(), &[Material::new(2.9, 0.7, 0.9).unwrap()]).unwrap();
        assert_eq!(v.warnings, alloc::vec![ContrastWarning { layer: 1 }]);
        let v = validate_stack(&[2.0, 1.0], Material::unit(), &[Material::new(2.0, 2.0, 0.9).unwrap()]).unwrap();
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn default_geometry() {
        assert_eq!(default_radii(0), alloc::vec![1.0]);
        assert_eq!(default_radii(2), alloc::vec![2.0, 1.5, 1.0]);
    }
}
