#include "excal/report.hpp"

#include "json.hpp"

namespace excal {

namespace {
using nlohmann::json;
}

std::string to_json_text(const IdentityReport& r) {
  json j;
  j["name"] = r.name;
  j["samples"] = r.samples;
  j["max_abs"] = r.max_abs;
  j["max_rel"] = r.max_rel;
  j["scale"] = r.scale;
  j["worst_point"] = r.worst_point;
  return j.dump(2);
}

std::string to_json_text(const WeakDivResult& r) {
  json j;
  j["residual"] = r.residual;
  j["error_estimate"] = r.error_estimate;
  j["scale"] = r.scale;
  return j.dump(2);
}

std::string to_json_text(const SurfaceMeasureReport& r) {
  json j;
  j["radii"] = r.radii;
  j["sigma_r"] = r.sigma_r;
  j["sigma_err"] = r.sigma_err;
  j["sigma_extrapolated"] = r.sigma_extrapolated;
  j["sigma_direct"] = r.sigma_direct;
  j["observed_order"] = r.observed_order;
  j["monotone_ok"] = r.monotone_ok;
  return j.dump(2);
}

std::string to_json_text(const TubeAverageReport& r) {
  json j;
  j["radii"] = r.radii;
  j["averages"] = r.averages;
  j["extrapolated"] = r.extrapolated;
  j["direct"] = r.direct;
  j["observed_order"] = r.observed_order;
  return j.dump(2);
}

std::string to_json_text(const Theorem2Report& r) {
  json j;
  j["lhs"] = r.lhs;
  j["radii"] = r.radii;
  j["rhs_r"] = r.rhs_r;
  j["rhs_extrapolated"] = r.rhs_extrapolated;
  j["difference"] = r.difference;
  j["observed_order"] = r.observed_order;
  j["max_abs_div_lift"] = r.max_abs_div_lift;
  return j.dump(2);
}

}  // namespace excal
