// Plan JSON ("ortacplus-plan/1") encode/decode and violation serialization.
// The wire format is stable: key order, location encoding ("n:9" / "e:8-9"),
// and canonical edge order are all pinned here.

#pragma once

#include <string>

#include <json.hpp>

#include "ortacplus/model.hpp"
#include "ortacplus/validator.hpp"

namespace ortac::plan_io {

struct PlanFormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string encode_location(const Location &l);
// Strict: rejects anything but "n:<id>" / "e:<u>-<v>" with u < v.
Location decode_location(const std::string &text);

nlohmann::ordered_json plan_to_json(const Plan &p);
std::string plan_to_string(const Plan &p);

// Throws PlanFormatError on malformed input. Trajectory lengths are not
// checked against the horizon; the validator reports those as violations.
Plan plan_from_json(const nlohmann::json &j);
Plan plan_from_string(const std::string &text);

nlohmann::ordered_json violations_to_json(const std::vector<validator::Violation> &vs);

}  // namespace ortac::plan_io
