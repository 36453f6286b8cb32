//! The JSON instance file read and written by the command line.

use serde::{Deserialize, Serialize};

use crate::index::{EquationFlags, GrowthRule};
use crate::operator::{profile_from_operators, CyclicOperator, OperatorError};
use crate::radii::{Equation, FieldConfig, MultiRadiusProfile, ProfileError};
use crate::skeleton::CurveSkeleton;

/// One operator, or one per carrier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Operators {
    One(CyclicOperator),
    Many(Vec<CyclicOperator>),
}

impl Operators {
    pub fn as_slice(&self) -> &[CyclicOperator] {
        match self {
            Operators::One(op) => std::slice::from_ref(op),
            Operators::Many(ops) => ops,
        }
    }
}

/// A skeleton with radii given either directly or through operators.
/// With `growth`, the file describes the exhaustion started by its own
/// skeleton and profile, which must then be the rule's first domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub field: FieldConfig,
    pub skeleton: CurveSkeleton,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<MultiRadiusProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<Operators>,
    #[serde(default)]
    pub flags: EquationFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthRule>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("cannot parse instance: {0}")]
    Parse(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

impl InstanceFile {
    pub fn with_profile(field: FieldConfig, skeleton: CurveSkeleton, profile: MultiRadiusProfile) -> Self {
        InstanceFile { field, skeleton, profile: Some(profile), operator: None, flags: EquationFlags::default(), growth: None }
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let inst: InstanceFile = serde_json::from_str(text).map_err(|e| InstanceError::Parse(e.to_string()))?;
        match (&inst.profile, &inst.operator) {
            (Some(_), Some(_)) => Err(InstanceError::Invalid("give either profile or operator, not both".into())),
            (None, None) => Err(InstanceError::Invalid("missing profile or operator".into())),
            _ => Ok(inst),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances serialize")
    }

    /// The radii, computed from the operators when needed.
    pub fn resolve_profile(&self) -> Result<MultiRadiusProfile, InstanceError> {
        match (&self.profile, &self.operator) {
            (Some(p), _) => Ok(p.clone()),
            (None, Some(ops)) => Ok(profile_from_operators(&self.skeleton, ops.as_slice(), &self.field)?),
            (None, None) => Err(InstanceError::Invalid("missing profile or operator".into())),
        }
    }

    /// Full validation: skeleton, profile invariants, and the growth rule's
    /// agreement with the stored first domain.
    pub fn validate(&self) -> Result<MultiRadiusProfile, InstanceError> {
        let prof = self.resolve_profile()?;
        Equation::new(&self.skeleton, &prof)?;
        if let Some(rule) = &self.growth {
            let (sk0, p0) = rule.build(0)?;
            if sk0 != self.skeleton || p0 != prof {
                return Err(InstanceError::Invalid("skeleton and profile differ from the growth rule's first domain".into()));
            }
        }
        Ok(prof)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{disk_example, settling_growth};
    use crate::rational::qi;
    use crate::skeleton::Vertex;

    #[test]
    fn round_trip_is_exact() {
        let (sk, ops) = disk_example();
        let inst = InstanceFile {
            field: FieldConfig::zero(),
            skeleton: sk,
            profile: None,
            operator: Some(Operators::Many(ops)),
            flags: EquationFlags::all_liouville(),
            growth: None,
        };
        let text = inst.to_json();
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(back.to_json(), text);
        let prof = back.validate().unwrap();
        let again = InstanceFile::with_profile(FieldConfig::zero(), back.skeleton.clone(), prof);
        assert_eq!(InstanceFile::parse(&again.to_json()).unwrap(), again);
    }

    #[test]
    fn exactly_one_source_of_radii() {
        let sk = CurveSkeleton { disk_components: 1, ..Default::default() };
        let mut inst = InstanceFile::with_profile(FieldConfig::zero(), sk, MultiRadiusProfile::trivial(&CurveSkeleton::default(), 1));
        inst.profile.as_mut().unwrap().disks.push(vec![qi(0)]);
        assert!(inst.validate().is_ok());
        let mut both = serde_json::to_value(&inst).unwrap();
        both["operator"] = serde_json::json!([]);
        assert!(matches!(InstanceFile::parse(&both.to_string()), Err(InstanceError::Invalid(_))));
        both.as_object_mut().unwrap().remove("profile");
        both.as_object_mut().unwrap().remove("operator");
        assert!(matches!(InstanceFile::parse(&both.to_string()), Err(InstanceError::Invalid(_))));
        assert!(matches!(InstanceFile::parse("{\"field\": 3}"), Err(InstanceError::Parse(_))));
    }

    #[test]
    fn growth_must_start_at_the_stored_domain() {
        let rule = settling_growth(2);
        let (sk, p) = rule.build(0).unwrap();
        let mut inst = InstanceFile::with_profile(FieldConfig::zero(), sk, p);
        inst.growth = Some(rule);
        assert!(inst.validate().is_ok());
        inst.skeleton.vertices.push(Vertex::s_point("extra"));
        assert!(inst.validate().is_err());
    }
}
