//! Constructive factorization of orientation-preserving maps into order-preserving
//! maps and one distinguished generator per chain model.
//!
//! Every factorization returns a [`FactorizationWitness`]: the input together with a
//! word of tagged factors whose left-to-right composition is the input. Witnesses are
//! checked with [`verify_witness`] before they are handed out.

mod bounded;
mod ray;
mod verify;

use serde::{Deserialize, Serialize};

use crate::chain::ChainModel;
use crate::classify::{find_ideal, is_order_preserving, IdealOutcome};
use crate::error::{Error, Result};
use crate::ptrans::PiecewiseMap;
use crate::rational::Rational;

pub use bounded::{build_gamma, factor_minmax_closed, factor_minmax_gap, factor_minmax_halfopen};
pub use ray::{build_gamma_star, expand_h_gamma, factor_minonly, restrict_to_y, transport_h};
pub use verify::{verify_witness, CheckResult, VerifyReport};

/// Sample count used for the internal check run by [`factor`].
pub const INTERNAL_SAMPLES: usize = 256;

/// Parameters of the distinguished generator.
///
/// For `[a,b]`: `a < c_prime < c < d < b`. For `[a,inf)` the same inequalities hold
/// with `b` replaced by `y_max`, the right end of the bounded chain `[a, y_max]` the
/// factorization is transported through. For `(-inf,b]` the parameters are read in
/// the mirrored chain `[-b, inf)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub c: Rational,
    pub d: Rational,
    pub c_prime: Rational,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_max: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_fallback: Option<Rational>,
}

impl GeneratorParams {
    /// `c = a + (b-a)/3`, `d = a + 2(b-a)/3`, `c' = a + (b-a)/6` on `[a,b]`; on a ray
    /// the same rule applied to `[a, a+3]`, so `c = a + 1`.
    pub fn default_for(model: &ChainModel) -> GeneratorParams {
        match model {
            ChainModel::MinMax { a, b } => Self::thirds(a, b),
            ChainModel::MinOnly { a } => {
                let b = a + &Rational::from_int(3);
                GeneratorParams {
                    y_max: Some(b.clone()),
                    ..Self::thirds(a, &b)
                }
            }
            ChainModel::MaxOnly { .. } => Self::default_for(&model.mirrored()),
        }
    }

    fn thirds(a: &Rational, b: &Rational) -> GeneratorParams {
        let span = b - a;
        GeneratorParams {
            c: a + &(&span * &Rational::new(1, 3)),
            d: a + &(&span * &Rational::new(2, 3)),
            c_prime: a + &(&span * &Rational::new(1, 6)),
            y_max: None,
            p_fallback: None,
        }
    }

    /// Checks the ordering constraints for `model`.
    pub fn validate(&self, model: &ChainModel) -> Result<()> {
        let (a, b) = match model {
            ChainModel::MinMax { a, b } => (a.clone(), b.clone()),
            ChainModel::MinOnly { a } => {
                let b = self.y_max.clone().ok_or_else(|| {
                    Error::BadParams("y_max is required on a chain without maximum".into())
                })?;
                (a.clone(), b)
            }
            ChainModel::MaxOnly { .. } => return self.validate(&model.mirrored()),
        };
        let ordered = a < self.c_prime && self.c_prime < self.c && self.c < self.d && self.d < b;
        if !ordered {
            return Err(Error::BadParams(format!(
                "need a < c' < c < d < b, got a={a}, c'={}, c={}, d={}, b={b}",
                self.c_prime, self.c, self.d
            )));
        }
        Ok(())
    }

    /// The bounded chain `[a, y_max]` used on a ray.
    pub(crate) fn y_model(&self, model: &ChainModel) -> Result<ChainModel> {
        match model {
            ChainModel::MinOnly { a } => {
                let b = self
                    .y_max
                    .clone()
                    .ok_or_else(|| Error::BadParams("missing y_max".into()))?;
                ChainModel::min_max(a.clone(), b).map_err(|e| Error::BadParams(e.to_string()))
            }
            _ => Err(Error::BadParams("y_max only applies to [a,inf)".into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "O")]
    OrderPreserving,
    #[serde(rename = "G")]
    Generator,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub tag: Tag,
    pub map: PiecewiseMap,
}

impl Factor {
    pub fn o(map: PiecewiseMap) -> Self {
        Factor {
            tag: Tag::OrderPreserving,
            map: map.normalize(),
        }
    }

    pub fn g(map: PiecewiseMap) -> Self {
        Factor {
            tag: Tag::Generator,
            map: map.normalize(),
        }
    }
}

/// Which construction produced a witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    OrderPreserving,
    HalfOpenIdeal,
    ClosedIdeal,
    GapIdeal,
    /// Image hull bounded above.
    RayBoundedImage,
    /// Image hull unbounded above.
    RayUnboundedImage,
    Mirrored,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationWitness {
    pub input: PiecewiseMap,
    pub factors: Vec<Factor>,
    pub params: GeneratorParams,
    pub verified: bool,
}

impl FactorizationWitness {
    pub fn generator_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| f.tag == Tag::Generator)
            .count()
    }

    pub fn composition(&self) -> Result<PiecewiseMap> {
        PiecewiseMap::compose_all(self.factors.iter().map(|f| &f.map))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("witnesses always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Runs the internal check and marks the witness verified, or fails loudly.
    pub(crate) fn sealed(mut self) -> Result<Self> {
        let report = verify_witness(&self, INTERNAL_SAMPLES, 0);
        if !report.all_pass() {
            return Err(Error::VerificationFailed(report.summary()));
        }
        self.verified = true;
        Ok(self)
    }
}

/// The generator adjoined to O(X) for `model`.
pub fn model_generator(model: &ChainModel, params: &GeneratorParams) -> Result<PiecewiseMap> {
    match model {
        ChainModel::MinMax { .. } => build_gamma(model, params),
        ChainModel::MinOnly { .. } => build_gamma_star(model, params),
        ChainModel::MaxOnly { .. } => Ok(build_gamma_star(&model.mirrored(), params)?.mirrored()),
    }
}

/// Conjugation by `x -> -x`; swaps `[a,inf)` and `(-inf,-a]`, and sends `[a,b]` to `[-b,-a]`.
pub fn dualize(f: &PiecewiseMap) -> PiecewiseMap {
    f.mirrored()
}

/// The route `factor` takes for `alpha`, without building anything.
pub fn route_of(alpha: &PiecewiseMap) -> Result<Route> {
    let dec = match find_ideal(alpha) {
        IdealOutcome::NotOp => return Err(Error::NotOp),
        IdealOutcome::ConstantMap => return Ok(Route::OrderPreserving),
        IdealOutcome::Ideal(dec) => dec,
    };
    if dec.is_whole_carrier() {
        return Ok(Route::OrderPreserving);
    }
    Ok(match &alpha.model {
        ChainModel::MinMax { .. } => {
            if dec.x1.max().is_some() {
                Route::ClosedIdeal
            } else if dec.x2.min().is_some() {
                Route::HalfOpenIdeal
            } else {
                Route::GapIdeal
            }
        }
        ChainModel::MinOnly { .. } => {
            if alpha.image_hull().hull.hi.is_finite() {
                Route::RayBoundedImage
            } else {
                Route::RayUnboundedImage
            }
        }
        ChainModel::MaxOnly { .. } => Route::Mirrored,
    })
}

/// Factors any orientation-preserving map of a chain with a minimum or a maximum.
pub fn factor(alpha: &PiecewiseMap, params: &GeneratorParams) -> Result<FactorizationWitness> {
    alpha.validate()?;
    params.validate(&alpha.model)?;
    let route = route_of(alpha)?;
    if route == Route::OrderPreserving {
        return FactorizationWitness {
            input: alpha.clone(),
            factors: vec![Factor::o(alpha.clone())],
            params: params.clone(),
            verified: false,
        }
        .sealed();
    }
    let dec = match find_ideal(alpha) {
        IdealOutcome::Ideal(dec) => dec,
        _ => unreachable!("route_of handled the other outcomes"),
    };
    let generator = model_generator(&alpha.model, params)?;
    match route {
        Route::HalfOpenIdeal => factor_minmax_halfopen(alpha, &dec, &generator, params),
        Route::ClosedIdeal => factor_minmax_closed(alpha, &dec, &generator, params),
        Route::GapIdeal => factor_minmax_gap(alpha, &dec, &generator, params),
        Route::RayBoundedImage | Route::RayUnboundedImage => {
            factor_minonly(alpha, &generator, params)
        }
        Route::Mirrored => {
            let mirrored_input = dualize(alpha);
            let mirrored_generator = dualize(&generator);
            let w = factor_minonly(&mirrored_input, &mirrored_generator, params)?;
            FactorizationWitness {
                input: alpha.clone(),
                factors: w
                    .factors
                    .into_iter()
                    .map(|f| Factor {
                        tag: f.tag,
                        map: dualize(&f.map),
                    })
                    .collect(),
                params: params.clone(),
                verified: false,
            }
            .sealed()
        }
        Route::OrderPreserving => unreachable!(),
    }
}

/// `factor` with the default parameters of the input's model.
pub fn factor_default(alpha: &PiecewiseMap) -> Result<FactorizationWitness> {
    factor(alpha, &GeneratorParams::default_for(&alpha.model))
}

pub(crate) fn require_order_preserving(label: &str, map: &PiecewiseMap) -> Result<()> {
    if is_order_preserving(map) {
        Ok(())
    } else {
        Err(Error::VerificationFailed(format!(
            "{label} is not order-preserving"
        )))
    }
}
