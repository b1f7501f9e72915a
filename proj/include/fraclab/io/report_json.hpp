#pragma once

#include <nlohmann/json.hpp>

#include "fraclab/barriers.hpp"
#include "fraclab/extension.hpp"
#include "fraclab/geometry_checks.hpp"
#include "fraclab/paraboloids.hpp"
#include "fraclab/problems.hpp"
#include "fraclab/regularity.hpp"

namespace fraclab::io {

// JSON views of the module reports.  Non-finite numbers become null.
nlohmann::json to_json(const DecayPolynomial& p);
nlohmann::json to_json(const DecayReport& r);
nlohmann::json to_json(const CampanatoReport& r);
nlohmann::json to_json(const HarnackReport& r);
nlohmann::json to_json(const HarnackSweep& r);
nlohmann::json to_json(const BarrierVerification& v);
nlohmann::json to_json(const CaseTwoProfile& p);
nlohmann::json to_json(const ContactReport& r);
nlohmann::json to_json(const QuasiTriangleReport& r);
nlohmann::json to_json(const ScalingReport& r);
nlohmann::json to_json(const QuotientReport& r);
nlohmann::json to_json(const EngulfingReport& r);
nlohmann::json to_json(const DoublingReport& r);
nlohmann::json to_json(const FractionalRegularityReport& r);
nlohmann::json to_json(const ExtremaReport& r);

// Rows of a report as CSV text: header line, '.' decimals, 17 significant digits.
std::string decay_csv(const DecayReport& r);
std::string harnack_csv(const HarnackSweep& r);

}  // namespace fraclab::io
