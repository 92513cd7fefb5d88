#pragma once

#include <json.hpp>

#include "smpkit/capacity.hpp"
#include "smpkit/feynman_kac.hpp"
#include "smpkit/maxprinciple.hpp"
#include "smpkit/model.hpp"
#include "smpkit/paths.hpp"
#include "smpkit/potentials.hpp"

namespace smpkit::io {

using json = nlohmann::json;

/// Non-finite doubles become null.
json number(double v);
json point(const Point& p);
Point point_from(const json& j);
json extended(const model::ExtendedReal& v);

json to_json(const DomainSpec& d);
json to_json(const model::OperatorSpec& op);
json to_json(const model::MeasureSpec& nu);
json to_json(const model::RadiiSchedule& r);

json to_json(const paths::Summary& s);
json to_json(const fk::FkEstimate& e);
json to_json(const fk::RepresentationReport& r);
json to_json(const potentials::PotentialValue& v);
json to_json(const potentials::LocalGreenIntegral& t);
json to_json(const potentials::NeumannResult& r);
json to_json(const mp::ClassificationReport& r);
json to_json(const mp::FineLimitResult& r);
json to_json(const mp::WeakTestSummary& s);
json to_json(const mp::DichotomyReport& r);
json to_json(const capacity::CapacitySolution& s, bool with_optimizer = false);

}  // namespace smpkit::io
